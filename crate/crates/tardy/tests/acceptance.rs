//! Acceptance suite: every shipping criterion as one test, each printing a
//! PASS/FAIL line with the measured evidence.
//!
//! Run with:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```
//!
//! The tests serialize themselves on a global gate so the timing-sensitive
//! scaling measurements never share the machine with other criteria.

use std::panic::AssertUnwindSafe;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tardy::fingerprint::FingerprintParams;
use tardy::gen::{generate, generate_with_total, DeadlineModel, GenConfig};
use tardy::solver::solve_with_params;
use tardy::solver_multi::solve_multi_with_params;
use tardy::{
    brute_force, brute_force_multi, lawler_moore, lawler_moore_multi, reconstruct, BitRope,
    Instance, SumCapSet,
};

fn gate() -> &'static Mutex<()> {
    static GATE: OnceLock<Mutex<()>> = OnceLock::new();
    GATE.get_or_init(|| Mutex::new(()))
}

fn criterion(number: u32, name: &str, body: impl FnOnce() -> String) {
    let _guard = gate().lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let started = Instant::now();
    match std::panic::catch_unwind(AssertUnwindSafe(body)) {
        Ok(detail) => println!(
            "criterion {number} ({name}): PASS [{detail}] in {:.1}s",
            started.elapsed().as_secs_f64()
        ),
        Err(panic) => {
            println!("criterion {number} ({name}): FAIL");
            std::panic::resume_unwind(panic);
        }
    }
}

fn fp() -> Arc<FingerprintParams> {
    Arc::new(FingerprintParams::from_seed(2027))
}

const MODELS: [DeadlineModel; 3] = [
    DeadlineModel::Uniform,
    DeadlineModel::Tight,
    DeadlineModel::SubsetSum,
];

#[test]
fn criterion_1_single_machine_oracle_equivalence() {
    criterion(1, "single-machine oracle equivalence", || {
        let params = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let trials = 1000;
        for trial in 0..trials {
            let instance = generate(&GenConfig {
                seed: rng.random(),
                jobs: rng.random_range(0..=16),
                max_processing: 8,
                model: MODELS[trial % MODELS.len()],
                machines: 1,
            });
            let fast = solve_with_params(&instance, &params).unwrap();
            let exact = brute_force(&instance).unwrap();
            assert_eq!(fast.opt, exact, "optimum mismatch on:\n{instance}");
            assert!(
                fast.insertions_observed <= fast.insertion_bound(),
                "insertion bound violated on:\n{instance}"
            );
        }
        format!("{trials} instances over all deadline models, opt exact")
    });
}

#[test]
fn criterion_2_set_equivalence_against_flat_dp() {
    criterion(2, "achievable-set equivalence vs flat DP", || {
        let params = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let trials = 200;
        let mut largest_total = 0;
        for trial in 0..trials {
            let jobs = rng.random_range(1..=100usize);
            let instance = generate(&GenConfig {
                seed: rng.random(),
                jobs,
                max_processing: (2000 / jobs as u64).max(1),
                model: MODELS[trial % MODELS.len()],
                machines: 1,
            });
            largest_total = largest_total.max(instance.total_processing());
            let fast = solve_with_params(&instance, &params).unwrap();
            let baseline = lawler_moore(&instance);
            assert_eq!(fast.totals, baseline.totals, "set mismatch on:\n{instance}");
            assert_eq!(fast.opt, baseline.opt);
            assert_eq!(fast.insertions_observed, baseline.insertions_observed);
            assert!(fast.insertions_observed <= fast.insertion_bound());
        }
        format!("{trials} instances (n up to 100, P up to {largest_total}), sets identical")
    });
}

#[test]
fn criterion_3_bounded_insertions() {
    criterion(3, "insertion count within 2P+1", || {
        let params = fp();
        // Adversarial tight-deadline family up to P = 10^6: nearly every
        // step deletes what the previous steps inserted.
        let mut worst_ratio = 0.0f64;
        for (seed, jobs, total) in [(31u64, 200, 10_000u64), (32, 2_000, 100_000), (33, 10_000, 1_000_000)] {
            let instance = generate_with_total(seed, jobs, total, DeadlineModel::Tight, 1);
            let result = solve_with_params(&instance, &params).unwrap();
            assert!(
                result.insertions_observed <= result.insertion_bound(),
                "tight family P={total}: {} insertions exceed {}",
                result.insertions_observed,
                result.insertion_bound()
            );
            worst_ratio = worst_ratio.max(result.insertions_observed as f64 / total as f64);
        }
        // Unit jobs with one shared deadline insert every total exactly
        // once: the counter reaches P, so the 2P+1 ceiling is within a
        // small constant of what really happens.
        let pairs: Vec<(u64, u64)> = (0..20_000).map(|_| (1u64, 20_000u64)).collect();
        let instance = Instance::new(1, &pairs);
        let result = solve_with_params(&instance, &params).unwrap();
        assert!(result.insertions_observed >= result.total_processing);
        assert_eq!(result.insertions_observed, 20_000);
        format!(
            "tight family up to P=10^6 within bound (worst observed/P = {worst_ratio:.2}), \
             unit-job family reaches P insertions"
        )
    });
}

#[test]
fn criterion_4_multi_machine_triple_agreement() {
    criterion(4, "multi-machine triple agreement", || {
        let params = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let trials = 300;
        for trial in 0..trials {
            let machines = if trial % 2 == 0 { 2u32 } else { 3 };
            let max_jobs = if machines == 2 { 12 } else { 9 };
            let instance = generate(&GenConfig {
                seed: rng.random(),
                jobs: rng.random_range(0..=max_jobs),
                max_processing: if machines == 2 { 5 } else { 4 },
                model: MODELS[trial % MODELS.len()],
                machines,
            });
            let fast = solve_multi_with_params(&instance, &params).unwrap();
            let baseline = lawler_moore_multi(&instance).unwrap();
            let exact = brute_force_multi(&instance).unwrap();
            assert_eq!(fast.opt, baseline.opt, "m={machines} on:\n{instance}");
            assert_eq!(fast.opt, exact, "m={machines} on:\n{instance}");
            assert_eq!(fast.totals, baseline.totals, "m={machines} on:\n{instance}");
            assert!(
                (fast.insertions_observed as u128) <= fast.insertion_bound(),
                "m={machines} insertion bound violated on:\n{instance}"
            );
        }
        format!("{trials} instances with m in {{2,3}}, three solvers agree")
    });
}

#[test]
fn criterion_5_reconstruction_validity() {
    criterion(5, "reconstruction validity for every achievable total", || {
        let params = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let trials = 500;
        let mut reconstructions = 0u64;
        for trial in 0..trials {
            let instance = generate(&GenConfig {
                seed: rng.random(),
                jobs: rng.random_range(0..=14),
                max_processing: 12,
                model: MODELS[trial % MODELS.len()],
                machines: 1,
            });
            let result = solve_with_params(&instance, &params).unwrap();
            assert!(result.totals.len() <= 200, "instance grew past the size cap");
            for &target in &result.totals {
                let schedule = reconstruct(&result, &instance, target).unwrap();
                schedule
                    .validate(&instance)
                    .unwrap_or_else(|err| panic!("invalid schedule ({err}) on:\n{instance}"));
                assert_eq!(schedule.total, target);
                reconstructions += 1;
            }
        }
        format!("{trials} instances, {reconstructions} schedules validated")
    });
}

#[test]
fn criterion_6_near_linear_scaling() {
    criterion(6, "near-linear scaling and baseline speedup", || {
        let params = fp();
        let sizes = [100_000u64, 200_000, 400_000, 800_000];
        let reps = 5;
        let mut medians = Vec::new();
        for &total in &sizes {
            let instance = generate_with_total(
                60_000 + total,
                (total / 10) as usize,
                total,
                DeadlineModel::Uniform,
                1,
            );
            // One warmup solve, then the measured repetitions.
            let warmup = solve_with_params(&instance, &params).unwrap();
            assert!(warmup.insertions_observed <= warmup.insertion_bound());
            let mut times: Vec<f64> = (0..reps)
                .map(|_| {
                    let start = Instant::now();
                    let result = solve_with_params(&instance, &params).unwrap();
                    assert_eq!(result.opt, warmup.opt);
                    start.elapsed().as_secs_f64()
                })
                .collect();
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(times[reps / 2]);
        }
        let ratios: Vec<f64> = medians.windows(2).map(|w| w[1] / w[0]).collect();
        for (pair, &ratio) in sizes.windows(2).zip(&ratios) {
            assert!(
                ratio <= 3.0,
                "time({})/time({}) = {ratio:.2} exceeds 3.0 (medians {medians:?})",
                pair[1],
                pair[0]
            );
        }

        let race = generate_with_total(61_000, 2_000, 2_000_000, DeadlineModel::Uniform, 1);
        let _ = solve_with_params(&race, &params).unwrap();
        let mut fast_times: Vec<f64> = (0..3)
            .map(|_| {
                let start = Instant::now();
                let _ = solve_with_params(&race, &params).unwrap();
                start.elapsed().as_secs_f64()
            })
            .collect();
        fast_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut lm_times: Vec<f64> = (0..3)
            .map(|_| {
                let start = Instant::now();
                let _ = lawler_moore(&race);
                start.elapsed().as_secs_f64()
            })
            .collect();
        lm_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let speedup = lm_times[1] / fast_times[1];
        assert!(
            speedup >= 5.0,
            "fast solver only {speedup:.2}x faster than the flat DP at n=2000, P=2*10^6"
        );
        let ratio_text: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
        format!(
            "doubling ratios [{}] all <= 3.0, speedup over flat DP {speedup:.1}x",
            ratio_text.join(", ")
        )
    });
}

#[test]
fn criterion_7_property_suites() {
    criterion(7, "rope and set property fuzzing", || {
        let rope_ops = mirror_fuzz(10_000);
        let set_ops = sumcap_fuzz(1_080);
        format!("{rope_ops} rope ops and {set_ops} set ops, zero mismatches at k=2")
    });
}

#[test]
fn criterion_8_subset_sum_specialization() {
    criterion(8, "subset-sum specialization", || {
        let params = fp();
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        let trials = 100;
        for _ in 0..trials {
            let instance = generate(&GenConfig {
                seed: rng.random(),
                jobs: rng.random_range(1..=60),
                max_processing: 30,
                model: DeadlineModel::SubsetSum,
                machines: 1,
            });
            let result = solve_with_params(&instance, &params).unwrap();
            let processing: Vec<u64> = instance.jobs.iter().map(|j| j.processing).collect();
            assert_eq!(
                result.totals,
                subset_sums(&processing),
                "reachable sets differ on:\n{instance}"
            );
        }
        format!("{trials} shared-deadline instances match the flat subset-sum DP")
    });
}

/// Independent subset-sum oracle: the textbook one-dimensional DP.
fn subset_sums(processing: &[u64]) -> Vec<u64> {
    let total: u64 = processing.iter().sum();
    let mut reachable = vec![false; total as usize + 1];
    reachable[0] = true;
    for &p in processing {
        for s in (p..=total).rev() {
            if reachable[(s - p) as usize] {
                reachable[s as usize] = true;
            }
        }
    }
    (0..=total).filter(|&s| reachable[s as usize]).collect()
}

// ---------------------------------------------------------------------------
// Criterion 7 machinery: randomized op sequences checked against naive
// mirrors, with a full structural audit after every mutation.
// ---------------------------------------------------------------------------

fn naive_lce(a: &[bool], b: &[bool], i: usize, j: usize) -> u64 {
    let mut len = 0;
    while i + len < a.len() && j + len < b.len() && a[i + len] == b[j + len] {
        len += 1;
    }
    len as u64
}

fn mirror_fuzz(ops: usize) -> usize {
    let params = fp();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut pool: Vec<(BitRope, Vec<bool>)> = Vec::new();

    let fresh = |rng: &mut ChaCha8Rng, params: &Arc<FingerprintParams>| {
        let len = rng.random_range(0..=1200u64);
        if rng.random_bool(0.3) {
            (BitRope::zeros(len, params), vec![false; len as usize])
        } else {
            let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(0.35)).collect();
            (BitRope::from_bits(bits.iter().copied(), params), bits)
        }
    };
    let verify = |rope: &BitRope, mirror: &[bool]| {
        rope.audit();
        assert_eq!(rope.len(), mirror.len() as u64);
        assert_eq!(rope.count_ones(), mirror.iter().filter(|&&b| b).count() as u64);
    };

    for _ in 0..ops {
        while pool.len() < 2 {
            let entry = fresh(&mut rng, &params);
            verify(&entry.0, &entry.1);
            pool.push(entry);
        }
        if pool.len() > 6 {
            let victim = rng.random_range(0..pool.len());
            pool.swap_remove(victim);
        }
        let which = rng.random_range(0..pool.len());
        match rng.random_range(0..10u32) {
            0 => {
                // concat two pool entries
                let other = rng.random_range(0..pool.len() - 1);
                let (a_rope, a_bits) = pool.swap_remove(which);
                let (b_rope, b_bits) = pool.swap_remove(other.min(pool.len() - 1));
                if a_bits.len() + b_bits.len() <= 4000 {
                    let rope = a_rope.concat(b_rope);
                    let mut bits = a_bits;
                    bits.extend_from_slice(&b_bits);
                    verify(&rope, &bits);
                    pool.push((rope, bits));
                } else {
                    pool.push((a_rope, a_bits));
                    pool.push((b_rope, b_bits));
                }
            }
            1 => {
                let (rope, bits) = pool.swap_remove(which);
                let k = rng.random_range(0..=rope.len());
                let (left, right) = rope.split_at(k);
                let right_bits = bits[k as usize..].to_vec();
                let left_bits = bits[..k as usize].to_vec();
                verify(&left, &left_bits);
                verify(&right, &right_bits);
                pool.push((left, left_bits));
                pool.push((right, right_bits));
            }
            2 => {
                let (rope, bits) = &mut pool[which];
                if !bits.is_empty() {
                    let i = rng.random_range(0..bits.len());
                    let value = rng.random_bool(0.5);
                    rope.set(i as u64, value);
                    bits[i] = value;
                    verify(rope, bits);
                }
            }
            3 => {
                let (rope, bits) = &mut pool[which];
                if !bits.is_empty() {
                    let width = rng.random_range(1..=64.min(bits.len() as u64)) as u32;
                    let start = rng.random_range(0..=bits.len() as u64 - width as u64);
                    let word = rng.random::<u64>()
                        & if width == 64 { !0 } else { (1u64 << width) - 1 };
                    rope.or_word(start, word, width);
                    for q in 0..width as u64 {
                        if word >> q & 1 == 1 {
                            bits[(start + q) as usize] = true;
                        }
                    }
                    verify(rope, bits);
                }
            }
            4 => {
                let (rope, bits) = &mut pool[which];
                let lo = rng.random_range(0..=bits.len() as u64);
                let hi = rng.random_range(lo..=bits.len() as u64);
                rope.clear_range(lo, hi);
                bits[lo as usize..hi as usize].fill(false);
                verify(rope, bits);
            }
            5 => {
                let (rope, bits) = &pool[which];
                if !bits.is_empty() {
                    let i = rng.random_range(0..bits.len());
                    assert_eq!(rope.get(i as u64), bits[i]);
                }
                assert_eq!(
                    rope.last_one(),
                    bits.iter().rposition(|&b| b).map(|i| i as u64)
                );
            }
            6 => {
                let other = rng.random_range(0..pool.len());
                let (a_rope, a_bits) = &pool[which];
                let (b_rope, b_bits) = &pool[other];
                let i = rng.random_range(0..=a_bits.len());
                let j = rng.random_range(0..=b_bits.len());
                assert_eq!(
                    BitRope::lce(a_rope, b_rope, i as u64, j as u64),
                    naive_lce(a_bits, b_bits, i, j)
                );
            }
            7 => {
                let (rope, bits) = &pool[which];
                let lo = rng.random_range(0..=bits.len() as u64);
                let hi = rng.random_range(lo..=bits.len() as u64);
                let expect: Vec<u64> = (lo..hi).filter(|&i| bits[i as usize]).collect();
                assert_eq!(rope.iter_ones(lo, hi).collect::<Vec<_>>(), expect);
                assert_eq!(rope.count_ones_in(lo, hi), expect.len() as u64);
                assert_eq!(rope.first_one_in(lo, hi), expect.first().copied());
                assert_eq!(rope.last_one_in(lo, hi), expect.last().copied());
            }
            8 => {
                let (rope, bits) = &pool[which];
                let lo = rng.random_range(0..=bits.len() as u64);
                let hi = rng.random_range(lo..=bits.len() as u64);
                let words = rope.read_words(lo, hi);
                for (q, i) in (lo..hi).enumerate() {
                    assert_eq!(
                        words[q / 64] >> (q % 64) & 1 == 1,
                        bits[i as usize],
                        "read_words({lo},{hi}) bit {q}"
                    );
                }
            }
            _ => {
                let entry = fresh(&mut rng, &params);
                verify(&entry.0, &entry.1);
                pool.push(entry);
            }
        }
    }
    ops
}

fn sumcap_fuzz(min_ops: usize) -> usize {
    let params = fp();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut executed = 0usize;
    for machines in [1u32, 2, 3] {
        let per_machine = min_ops / 3;
        let mut done = 0usize;
        while done < per_machine {
            let universe = rng.random_range(2..=64u64);
            let mut mirror: std::collections::BTreeSet<Vec<u64>> =
                [vec![0u64; machines as usize]].into_iter().collect();
            let mut set =
                SumCapSet::new(universe, machines, &[vec![0; machines as usize]], &params)
                    .unwrap();
            for _ in 0..30 {
                if rng.random_bool(0.6) {
                    let p = rng.random_range(1..universe);
                    let overflow = mirror
                        .iter()
                        .any(|v| v.iter().any(|&c| c + p >= universe));
                    if overflow {
                        assert!(set.sum_unit_shifts(p).is_err(), "missed overflow");
                    } else {
                        let before = mirror.clone();
                        for member in &before {
                            for machine in 0..machines as usize {
                                let mut shifted = member.clone();
                                shifted[machine] += p;
                                mirror.insert(shifted);
                            }
                        }
                        let expected: std::collections::BTreeSet<Vec<u64>> =
                            mirror.difference(&before).cloned().collect();
                        let diff = set.sum_unit_shifts(p).unwrap();
                        let got: std::collections::BTreeSet<Vec<u64>> =
                            diff.indices().map(|i| set.unflatten(i)).collect();
                        assert_eq!(got, expected, "m={machines} u={universe} p={p}");
                        // Every reported machine tag must name a real source.
                        for ins in &diff.inserted {
                            let mut source = set.unflatten(ins.index);
                            assert!(source[ins.machine as usize] >= p);
                            source[ins.machine as usize] -= p;
                            assert!(before.contains(&source), "bogus machine tag");
                        }
                    }
                } else {
                    let d = rng.random_range(0..universe);
                    set.cap(d);
                    mirror.retain(|v| v.iter().all(|&c| c <= d));
                }
                let got: Vec<Vec<u64>> = set.member_vectors();
                let expect: Vec<Vec<u64>> = {
                    let mut items: Vec<(u64, Vec<u64>)> = mirror
                        .iter()
                        .map(|v| (set.flatten(v), v.clone()))
                        .collect();
                    items.sort_unstable_by_key(|(i, _)| *i);
                    items.into_iter().map(|(_, v)| v).collect()
                };
                assert_eq!(got, expect, "membership diverged (m={machines})");
                done += 1;
            }
        }
        executed += done;
    }
    executed
}
