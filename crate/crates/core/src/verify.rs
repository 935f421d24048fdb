//! Runners for the acceptance criteria, shared by the `verify` subcommand
//! and the acceptance test target.

use std::cmp::Ordering;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complexes::{contractibility_pipeline, homology_f2, is_acyclic, reductive_subposet, OrderComplex, Verdict};
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::folds::{ends_at_standard_rose, fold_to_rose, verify_kn_path};
use crate::free_words::{canonical_class, class_count_up_to, Automorphism, ConjugacyClass, Letter, Word};
use crate::graphs::{connects_components, core_graphs, tree_replacement_permutation};
use crate::marked_graphs::{compare_norm, roses_equal, Rose};
use crate::sampling::{dedup_roses, random_isometric_twin, random_nonstandard_rose, random_rose, rng_from_seed};
use crate::whitehead::{
    all_ideal_trees, dot, full_set, is_reductive_edge, is_reductive_tree, key_lemma_gamma, max_reductive_edge,
    reductive_edges, reductive_pairs, sector_census, star_graph, whitehead_reduce, Subset,
};

/// Names accepted by [`run_suite`], in criterion order.
pub const SUITES: [&str; 10] = [
    "class-counts",
    "valence-law",
    "count-identity",
    "fold-connectivity",
    "tree-replacement",
    "norm-comparison",
    "factorization",
    "key-lemma",
    "contractibility",
    "descent",
];

/// Radius of the ball of Nielsen products searched exhaustively at rank 2.
pub const RANK2_BALL_RADIUS: usize = 4;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Restrict to one rank where the criterion allows it.
    pub n: Option<usize>,
    /// Override the default sample count.
    pub samples: Option<usize>,
    pub limits: Limits,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            seed: 2024,
            n: None,
            samples: None,
            limits: Limits::default(),
        }
    }
}

impl VerifyOptions {
    fn ranks(&self, default: &[usize]) -> Vec<usize> {
        match self.n {
            Some(n) => vec![n],
            None => default.to_vec(),
        }
    }

    fn samples(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        rng_from_seed(self.seed.wrapping_mul(1_000_003).wrapping_add(salt))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<18} {:>8} ms  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.millis,
            self.detail
        )
    }
}

/// Outcome of one criterion body: pass/fail and a one-line summary.
type Outcome = Result<(bool, String)>;

/// Runs one criterion by name; `None` for an unknown name.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<CriterionReport> {
    let id = SUITES.iter().position(|&s| s == name)? + 1;
    Some(run_criterion(id, opts))
}

/// Runs criterion `id` (1-based). Errors count as failures.
pub fn run_criterion(id: usize, opts: &VerifyOptions) -> CriterionReport {
    let start = Instant::now();
    let outcome = match id {
        1 => class_counts(opts),
        2 => valence_law(opts),
        3 => count_identity(opts),
        4 => fold_connectivity(opts),
        5 => tree_replacement(opts),
        6 => norm_comparison(opts),
        7 => factorization(opts),
        8 => key_lemma(opts),
        9 => contractibility(opts),
        10 => descent(opts),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport {
        id,
        name: SUITES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionReport> {
    (1..=SUITES.len()).map(|id| run_criterion(id, opts)).collect()
}

fn class_counts(opts: &VerifyOptions) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in opts.ranks(&[2, 3, 4]) {
        let got = class_count_up_to(n, 2);
        ok &= got == n + n * n;
        parts.push(format!("n={n}: {got}/{}", n + n * n));
    }
    Ok((ok, parts.join(", ")))
}

fn random_class(rng: &mut impl Rng, n: usize, max_len: usize) -> ConjugacyClass {
    loop {
        let len = rng.gen_range(1..=max_len);
        let w = Word::new((0..len).map(|_| Letter::from_code(rng.gen_range(0..2 * n))));
        if let Ok(c) = canonical_class(&w) {
            return c;
        }
    }
}

fn valence_law(opts: &VerifyOptions) -> Outcome {
    let mut rng = opts.rng(2);
    let ranks = opts.ranks(&[2, 3]);
    let samples = opts.samples(500);
    let mut bad = 0;
    for _ in 0..samples {
        let n = ranks[rng.gen_range(0..ranks.len())];
        let rho = random_rose(&mut rng, n, 8);
        let w = random_class(&mut rng, n, 6);
        let g = star_graph(&rho, &w);
        let len = rho.translation_length(&w);
        if g.valences().iter().sum::<usize>() != 2 * len || g.edges.len() != len {
            bad += 1;
        }
    }
    let figure = star_graph(&Rose::standard(4), &ConjugacyClass::parse("bDcc", 4)?);
    let petals = figure.petal_valences();
    let figure_ok = petals == [0, 2, 4, 2] && petals.iter().sum::<usize>() == 8;
    Ok((
        bad == 0 && figure_ok,
        format!("{samples} samples, {bad} violations; figure petal sums {petals:?}"),
    ))
}

fn random_subset(rng: &mut impl Rng, n: usize) -> Subset {
    rng.gen::<u32>() & full_set(n)
}

fn count_identity(opts: &VerifyOptions) -> Outcome {
    const LEN: usize = 4;
    let mut rng = opts.rng(3);
    let samples = opts.samples(200);
    let mut bad = 0;
    let mut total = 0;
    for n in opts.ranks(&[2, 3]) {
        let h = full_set(n);
        for _ in 0..samples {
            let rho = random_rose(&mut rng, n, 8);
            let (a, b) = (random_subset(&mut rng, n), random_subset(&mut rng, n));
            total += 1;
            // Disjoint pieces of the Venn diagram of A and B.
            let (x, y, z) = (a & !b, b & !a, h & !(a | b));
            let xy = dot(&rho, x, y)?;
            let symmetric = xy.agrees_up_to(&dot(&rho, y, x)?, LEN);
            let additive = dot(&rho, x, y | z)?.agrees_up_to(&xy.add(&dot(&rho, x, z)?), LEN);
            if !(symmetric && additive && crate::whitehead::count_identity_check(&rho, a, b, LEN)) {
                bad += 1;
            }
        }
    }
    Ok((
        bad == 0,
        format!("{total} subset pairs up to length {LEN}, {bad} violations"),
    ))
}

/// The roses shared by the fold and descent criteria.
fn fold_sample(opts: &VerifyOptions) -> Vec<Rose> {
    let mut rng = opts.rng(4);
    let ranks = opts.ranks(&[2, 3]);
    (0..opts.samples(200))
        .map(|_| {
            let n = ranks[rng.gen_range(0..ranks.len())];
            random_rose(&mut rng, n, 8)
        })
        .collect()
}

fn fold_connectivity(opts: &VerifyOptions) -> Outcome {
    let roses = fold_sample(opts);
    let (mut bad, mut moves, mut longest) = (0, 0, 0);
    for rho in &roses {
        let run = fold_to_rose(rho)?;
        moves += run.moves.len();
        longest = longest.max(run.path.len());
        let decreasing = run.moves.iter().all(|m| m.edges_after < m.edges_before);
        if !(decreasing && ends_at_standard_rose(&run.path) && verify_kn_path(&run.path)) {
            bad += 1;
        }
    }
    Ok((
        bad == 0,
        format!(
            "{} roses, {moves} folds, longest path {longest}, {bad} failures",
            roses.len()
        ),
    ))
}

fn tree_replacement(opts: &VerifyOptions) -> Outcome {
    let max_rank = opts.n.unwrap_or(3);
    let graphs = core_graphs(6, max_rank);
    let (mut pairs, mut bad) = (0, 0);
    for g in &graphs {
        let trees = g.maximal_trees()?;
        for phi in &trees {
            for f in &trees {
                pairs += 1;
                let phi_v: Vec<usize> = phi.edges().iter().copied().collect();
                let f_v: Vec<usize> = f.edges().iter().copied().collect();
                let sigma = tree_replacement_permutation(g, &phi_v, &f_v)?;
                let mut seen = sigma.clone();
                seen.sort_unstable();
                seen.dedup();
                let ok = seen.len() == sigma.len()
                    && phi_v.iter().zip(&sigma).all(|(&e, &j)| {
                        let replacement = f_v[j];
                        connects_components(g, phi, e, replacement) && (!f.contains(e) || replacement == e)
                    });
                if !ok {
                    bad += 1;
                }
            }
        }
    }
    Ok((
        bad == 0,
        format!("{} core graphs, {pairs} tree pairs, {bad} failures", graphs.len()),
    ))
}

fn norm_comparison(opts: &VerifyOptions) -> Outcome {
    let limits = &opts.limits;
    let mut rng = opts.rng(6);
    let ranks = opts.ranks(&[2, 3]);
    let samples = opts.samples(100);
    let (mut bad, mut equal_pairs) = (0, 0);
    let mut previous: Option<(Rose, Rose, Ordering)> = None;
    for k in 0..samples {
        let n = ranks[k % ranks.len()];
        let a = random_rose(&mut rng, n, 4);
        // Every fifth pair is an isometric copy, so Equal is exercised.
        let b = if k % 5 == 0 {
            random_isometric_twin(&mut rng, &a)
        } else {
            random_rose(&mut rng, n, 4)
        };
        let ab = compare_norm(&a, &b, limits)?;
        let ba = compare_norm(&b, &a, limits)?;
        let twins = compare_norm(
            &random_isometric_twin(&mut rng, &a),
            &random_isometric_twin(&mut rng, &b),
            limits,
        )?;
        let equal = roses_equal(&a, &b);
        equal_pairs += equal as usize;
        let mut ok = ab == ba.reverse() && (ab == Ordering::Equal) == equal && twins == ab;
        // Transitivity through the previous pair's second rose.
        if let Some((p, q, pq)) = previous.take().filter(|(p, _, _)| p.rank() == n) {
            let qa = compare_norm(&q, &a, limits)?;
            let pa = compare_norm(&p, &a, limits)?;
            if pq != Ordering::Greater && qa != Ordering::Greater {
                ok &= pa != Ordering::Greater;
            }
            if pq != Ordering::Less && qa != Ordering::Less {
                ok &= pa != Ordering::Less;
            }
        }
        previous = Some((a, b, ab));
        if !ok {
            bad += 1;
        }
    }
    Ok((
        bad == 0,
        format!("{samples} pairs ({equal_pairs} equal), {bad} violations"),
    ))
}

fn nonstandard_sample(opts: &VerifyOptions, salt: u64, count: usize) -> Vec<Rose> {
    let mut rng = opts.rng(salt);
    let ranks = opts.ranks(&[2, 3]);
    (0..count)
        .map(|k| random_nonstandard_rose(&mut rng, ranks[k % ranks.len()], 8))
        .collect()
}

fn factorization(opts: &VerifyOptions) -> Outcome {
    let limits = &opts.limits;
    let roses = nonstandard_sample(opts, 7, opts.samples(50));
    let (mut trees, mut reductive, mut bad) = (0, 0, 0);
    for rho in &roses {
        for t in all_ideal_trees(rho.rank()).into_iter().filter(|t| !t.is_empty()) {
            trees += 1;
            if !is_reductive_tree(rho, &t, limits)? {
                continue;
            }
            reductive += 1;
            let mut has_edge = false;
            for e in t.edges() {
                if is_reductive_edge(rho, e, limits)? {
                    has_edge = true;
                    break;
                }
            }
            bad += !has_edge as usize;
        }
    }
    Ok((
        bad == 0,
        format!(
            "{} roses, {trees} trees, {reductive} reductive, {bad} counterexamples",
            roses.len()
        ),
    ))
}

/// Every elementary Nielsen automorphism of rank `n`.
fn nielsen_generators(n: usize) -> Vec<Automorphism> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            for inverse in [false, true] {
                for right in [false, true] {
                    out.push(Automorphism::transvection(n, i, j, inverse, right));
                }
            }
        }
        out.push(Automorphism::inversion(n, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(i, j);
            out.push(Automorphism::signed_permutation(&perm, &vec![false; n]));
        }
    }
    out
}

/// Distinct roses reachable from the standard one by at most `radius`
/// elementary Nielsen automorphisms.
pub fn nielsen_ball(n: usize, radius: usize) -> Vec<Rose> {
    let gens = nielsen_generators(n);
    let mut all = vec![Rose::standard(n)];
    let mut frontier = all.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for r in &frontier {
            for g in &gens {
                next.push(Rose::new(r.phi().compose(g)).expect("Nielsen products are automorphisms"));
            }
        }
        let known = all.len();
        all.extend(next);
        all = dedup_roses(all);
        frontier = all[known..].to_vec();
    }
    all
}

/// Counts from a Key Lemma search.
#[derive(Clone, Debug, Default, Serialize)]
pub struct KeyLemmaTally {
    pub roses: usize,
    /// `(ρ, (M, m), α)` triples meeting the hypotheses.
    pub instances: usize,
    /// Instances in which the four sectors each hold one of `a, ā, m, m̄`.
    pub census: usize,
    pub violations: usize,
}

/// Checks the Key Lemma on every maximal pair and crossing reductive edge of
/// each rose.
pub fn key_lemma_search(roses: impl IntoIterator<Item = Rose>, limits: &Limits) -> Result<KeyLemmaTally> {
    let mut t = KeyLemmaTally::default();
    for rho in roses {
        key_lemma_on(&rho, limits, &mut t)?;
    }
    Ok(t)
}

fn key_lemma_on(rho: &Rose, limits: &Limits, tally: &mut KeyLemmaTally) -> Result<()> {
    tally.roses += 1;
    let Some(max) = max_reductive_edge(rho, limits)? else {
        return Ok(());
    };
    let reductive = reductive_edges(rho, limits)?;
    for pair in &max.tied {
        for alpha in reductive.iter().filter(|a| a.crosses(&pair.edge)) {
            tally.instances += 1;
            match key_lemma_gamma(rho, &max, pair, alpha, limits) {
                Ok(out) => {
                    if reductive_pairs(rho, &out.gamma, limits)?.is_empty() {
                        tally.violations += 1;
                    }
                }
                Err(Error::ConclusionFailed(_)) => tally.violations += 1,
                Err(e) => return Err(e),
            }
            for p in reductive_pairs(rho, alpha, limits)? {
                if let Some(holds) = sector_census(rho, pair, alpha, p.half_edge, limits)? {
                    tally.census += 1;
                    tally.violations += !holds as usize;
                }
            }
        }
    }
    Ok(())
}

fn key_lemma(opts: &VerifyOptions) -> Outcome {
    let limits = &opts.limits;
    // the sector census configuration is rare below rank 4
    let ranks = opts.ranks(&[2, 3, 4]);
    let mut parts = Vec::new();
    let mut ok = true;
    if ranks.contains(&2) {
        let t = key_lemma_search(nielsen_ball(2, RANK2_BALL_RADIUS), limits)?;
        ok &= t.violations == 0;
        parts.push(format!(
            "n=2 ball radius {RANK2_BALL_RADIUS}: {} roses, {} instances, {} violations",
            t.roses, t.instances, t.violations
        ));
    }
    for &n in ranks.iter().filter(|&&n| n != 2) {
        let mut rng = opts.rng(8 + n as u64);
        let count = if n > 3 {
            opts.samples(200) / 5
        } else {
            opts.samples(200)
        };
        let roses: Vec<Rose> = (0..count.max(1))
            .map(|_| random_nonstandard_rose(&mut rng, n, 8))
            .collect();
        let t = key_lemma_search(roses, limits)?;
        ok &= t.violations == 0;
        parts.push(format!(
            "n={n}: {} roses, {} instances, {} census cases, {} violations",
            t.roses, t.instances, t.census, t.violations
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn contractibility(opts: &VerifyOptions) -> Outcome {
    let limits = &opts.limits;
    let roses = nonstandard_sample(opts, 9, opts.samples(30));
    let (mut bad, mut steps, mut fallbacks) = (0, 0, 0);
    for rho in &roses {
        let (verdict, trace) = contractibility_pipeline(rho, limits)?;
        steps += trace.steps.len();
        fallbacks += trace
            .steps
            .iter()
            .filter(|s| {
                matches!(
                    s.justification,
                    crate::complexes::Justification::AddGamma {
                        side_condition: false,
                        ..
                    }
                )
            })
            .count();
        let complex = OrderComplex::of_poset(&reductive_subposet(rho, limits)?)?;
        let betti = homology_f2(&complex)?;
        if verdict != Verdict::Contractible || !is_acyclic(&betti) || complex.euler_characteristic() != 1 {
            bad += 1;
        }
    }
    let mut minimal_ok = true;
    for n in opts.ranks(&[2, 3]) {
        let r0 = Rose::standard(n);
        let (verdict, _) = contractibility_pipeline(&r0, limits)?;
        minimal_ok &= verdict == Verdict::EmptyComplex && reductive_edges(&r0, limits)?.is_empty();
    }
    Ok((
        bad == 0 && minimal_ok,
        format!(
            "{} roses, {steps} retraction steps ({fallbacks} side-condition fallbacks), {bad} failures; standard rose empty: {minimal_ok}",
            roses.len()
        ),
    ))
}

fn descent(opts: &VerifyOptions) -> Outcome {
    let limits = &opts.limits;
    let roses = fold_sample(opts);
    let (mut bad, mut longest, mut standard) = (0, 0, 0);
    for rho in &roses {
        let (end, trace) = whitehead_reduce(rho, limits)?;
        longest = longest.max(trace.len());
        let mut ok = true;
        let mut prev = rho.clone();
        for step in &trace {
            ok &= compare_norm(&prev, &step.rose, limits)? == Ordering::Greater;
            prev = step.rose.clone();
        }
        ok &= reductive_edges(&end, limits)?.is_empty();
        let is_standard = roses_equal(&end, &Rose::standard(end.rank()));
        standard += is_standard as usize;
        if rho.rank() == 2 {
            ok &= is_standard;
        }
        bad += !ok as usize;
    }
    Ok((
        bad == 0,
        format!(
            "{} roses, longest descent {longest}, {standard} end at the standard rose, {bad} failures",
            roses.len()
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_resolve_by_name() {
        assert!(run_suite("nonsense", &VerifyOptions::default()).is_none());
        let r = run_suite("class-counts", &VerifyOptions::default()).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.id, 1);
    }

    #[test]
    fn rank2_ball_grows() {
        assert_eq!(nielsen_ball(2, 0).len(), 1);
        let b1 = nielsen_ball(2, 1);
        // The transvections give the four roses [ab,b], [ba,b], [a,ba], [a,ab]
        // up to isometry; inversions and swaps fix the standard rose.
        assert!(b1.len() > 1 && b1.len() <= 9);
        assert!(nielsen_ball(2, 2).len() > b1.len());
    }
}
