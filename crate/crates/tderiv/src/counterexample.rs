//! A four-dimensional unital algebra on which pair compatibility does not
//! force a completion, in contrast to every nest algebra. The algebra has
//! basis (1, u, v, w) with u*w = v as the only nonzero product among the
//! non-unit basis elements. The pair delta(X) = X*w, tau(X) = w*X respects
//! every zero product, yet evaluating the would-be completion on U through
//! `u * 1` and through `1 * u` forces two different values, so the stacked
//! linear system for it is infeasible. A dimension census shows no nest
//! algebra is isomorphic to this one, so the contrast does not secretly
//! live inside the nest class.

use std::sync::Arc;

use crate::engine::{
    solve_rst, z_report, ImplementingTriple, OpMap, RstOutcome, ZVerdict, ZWitness,
};
use crate::error::Error;
use crate::mat::{solve_affine, Mat};
use crate::nest::{NestAlgebra, NestSpec};
use crate::rng::SplitMix64;
use crate::scalar::{FieldMode, Scalar};

/// A finite-dimensional associative unital algebra given by structure
/// constants: `table[(i*d + j)*d + s]` is the coefficient of `e_s` in
/// `e_i * e_j`. Construction validates associativity and the identity.
pub struct FdAlgebra {
    dim: usize,
    labels: Vec<String>,
    table: Vec<Scalar>,
    identity: Vec<Scalar>,
}

impl FdAlgebra {
    pub fn new(
        labels: Vec<String>,
        table: Vec<Scalar>,
        identity: Vec<Scalar>,
    ) -> Result<Self, Error> {
        let d = labels.len();
        if table.len() != d * d * d || identity.len() != d {
            return Err(Error::Dimension(format!(
                "structure table for dimension {d} must have {} entries",
                d * d * d
            )));
        }
        let alg = FdAlgebra { dim: d, labels, table, identity };
        for j in 0..d {
            let e = alg.basis(j);
            if alg.mul(&alg.identity, &e) != e || alg.mul(&e, &alg.identity) != e {
                return Err(Error::Precondition(format!(
                    "identity element is not neutral at basis {j}"
                )));
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let left = alg.mul(&alg.mul(&alg.basis(i), &alg.basis(j)), &alg.basis(k));
                    let right = alg.mul(&alg.basis(i), &alg.mul(&alg.basis(j), &alg.basis(k)));
                    if left != right {
                        return Err(Error::Precondition(format!(
                            "structure constants are not associative at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Repackage a nest algebra through its structure constants, so the
    /// generic invariants below can cross-check the specialized ones.
    pub fn from_nest(nest: &NestAlgebra) -> Self {
        let d = nest.dim();
        let mut table = vec![Scalar::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d {
                if let Some(s) = nest.unit_product(i, j) {
                    table[(i * d + j) * d + s] = Scalar::one();
                }
            }
        }
        let labels = (0..d).map(|s| nest.unit_label(s)).collect();
        FdAlgebra { dim: d, labels, table, identity: nest.identity().coords.clone() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> &[Scalar] {
        &self.identity
    }

    pub fn basis(&self, j: usize) -> Vec<Scalar> {
        let mut e = vec![Scalar::zero(); self.dim];
        e[j] = Scalar::one();
        e
    }

    fn coeff(&self, i: usize, j: usize, s: usize) -> &Scalar {
        &self.table[(i * self.dim + j) * self.dim + s]
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim;
        let mut out = vec![Scalar::zero(); d];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let prod = ai * bj;
                for s in 0..d {
                    let c = self.coeff(i, j, s);
                    if !c.is_zero() {
                        out[s] += &(&prod * c);
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x -> a * x`.
    pub fn left_rep(&self, a: &[Scalar]) -> Mat {
        let d = self.dim;
        let mut m = Mat::zeros(d, d);
        for j in 0..d {
            for (s, v) in self.mul(a, &self.basis(j)).into_iter().enumerate() {
                if !v.is_zero() {
                    *m.at_mut(s, j) = v;
                }
            }
        }
        m
    }

    /// Matrix of `x -> x * a`.
    pub fn right_rep(&self, a: &[Scalar]) -> Mat {
        let d = self.dim;
        let mut m = Mat::zeros(d, d);
        for j in 0..d {
            for (s, v) in self.mul(&self.basis(j), a).into_iter().enumerate() {
                if !v.is_zero() {
                    *m.at_mut(s, j) = v;
                }
            }
        }
        m
    }

    pub fn center_dim(&self) -> usize {
        let d = self.dim;
        let mut rows = Vec::with_capacity(d * d);
        for j in 0..d {
            for s in 0..d {
                let mut row = vec![Scalar::zero(); d];
                for m in 0..d {
                    let c = self.coeff(j, m, s) - self.coeff(m, j, s);
                    if !c.is_zero() {
                        row[m] = c;
                    }
                }
                rows.push(row);
            }
        }
        d - Mat::from_rows(rows).rank()
    }

    /// Radical dimension over a characteristic-zero field: x is radical
    /// exactly when `trace(L_{x*a}) = 0` for every a, a linear condition
    /// whose kernel this computes.
    pub fn radical_dim(&self) -> usize {
        let d = self.dim;
        // trace(L_{e_m}) for each basis element
        let traces: Vec<Scalar> = (0..d)
            .map(|m| {
                let mut t = Scalar::zero();
                for j in 0..d {
                    t += self.coeff(m, j, j);
                }
                t
            })
            .collect();
        let mut gram = Mat::zeros(d, d);
        for k in 0..d {
            for i in 0..d {
                let mut g = Scalar::zero();
                for m in 0..d {
                    let c = self.coeff(i, k, m);
                    if !c.is_zero() {
                        g += &(c * &traces[m]);
                    }
                }
                *gram.at_mut(k, i) = g;
            }
        }
        d - gram.rank()
    }
}

impl std::fmt::Debug for FdAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FdAlgebra(dim={}, basis={:?})", self.dim, self.labels)
    }
}

/// Basis slots of the contrast algebra.
pub const ONE: usize = 0;
pub const U: usize = 1;
pub const V: usize = 2;
pub const W: usize = 3;

/// The contrast algebra: unital, basis (1, u, v, w), and `u * w = v` as the
/// only nonzero product among u, v, w.
pub fn example_algebra() -> FdAlgebra {
    let d = 4;
    let mut table = vec![Scalar::zero(); d * d * d];
    let mut set = |i: usize, j: usize, s: usize| {
        table[(i * d + j) * d + s] = Scalar::one();
    };
    for j in 0..d {
        set(ONE, j, j);
    }
    for i in 1..d {
        set(i, ONE, i);
    }
    set(U, W, V);
    let mut identity = vec![Scalar::zero(); d];
    identity[ONE] = Scalar::one();
    FdAlgebra::new(
        vec!["1".into(), "u".into(), "v".into(), "w".into()],
        table,
        identity,
    )
    .expect("the contrast algebra is associative and unital")
}

/// The incompatible-looking pair: `delta(X) = X*w`, `tau(X) = w*X`.
/// Returned as matrices whose columns are basis images.
pub fn example_maps(alg: &FdAlgebra) -> (Mat, Mat) {
    let w = alg.basis(W);
    (alg.right_rep(&w), alg.left_rep(&w))
}

/// Exact certificate that the example pair respects every zero product.
///
/// The certificate has three layers. First, the defect
/// `delta(a)*b + a*tau(b)` is shown to equal `2*a*w*b` as a bilinear map by
/// comparing the two on all basis pairs. Second, two finite facts close the
/// case split over the scalar coefficient of `b`: `w` multiplied by any
/// radical basis element is zero (so the defect dies whenever `b` has no
/// unit part), and the radical cubes to zero (so any `b` with a unit part
/// is invertible, making `a*b = 0` force `a = 0`). Third, seeded sampling
/// re-checks the conclusion directly: for each sampled `a`, the defect is
/// evaluated against a full basis of `a`'s right annihilator, which covers
/// every zero-product partner of that `a` at once.
#[derive(Debug, Clone)]
pub struct ExampleZReport {
    pub defect_equals_sandwich: bool,
    pub w_annihilates_radical: bool,
    pub radical_nilpotent: bool,
    pub sampled_first_factors: usize,
    pub sampled_failures: usize,
}

impl ExampleZReport {
    pub fn holds(&self) -> bool {
        self.defect_equals_sandwich
            && self.w_annihilates_radical
            && self.radical_nilpotent
            && self.sampled_failures == 0
    }
}

pub fn verify_example_z(samples_per_stratum: usize, seed: u64) -> ExampleZReport {
    let alg = example_algebra();
    let (delta, tau) = example_maps(&alg);
    let w = alg.basis(W);
    let d = alg.dim();

    let mut defect_equals_sandwich = true;
    for i in 0..d {
        for j in 0..d {
            let a = alg.basis(i);
            let b = alg.basis(j);
            let defect = add(&alg.mul(&delta.apply(&a), &b), &alg.mul(&a, &tau.apply(&b)));
            let awb = alg.mul(&a, &alg.mul(&w, &b));
            let sandwich: Vec<Scalar> =
                awb.iter().map(|x| x * &Scalar::from_int(2)).collect();
            if defect != sandwich {
                defect_equals_sandwich = false;
            }
        }
    }

    let w_annihilates_radical =
        (1..d).all(|j| alg.mul(&w, &alg.basis(j)).iter().all(Scalar::is_zero));

    let radical_nilpotent = (1..d).all(|i| {
        (1..d).all(|j| {
            (1..d).all(|k| {
                alg.mul(&alg.mul(&alg.basis(i), &alg.basis(j)), &alg.basis(k))
                    .iter()
                    .all(Scalar::is_zero)
            })
        })
    });

    // Strata: unconstrained a, then a without unit part, then a deeper in
    // the radical. For each sample the right annihilator basis is complete,
    // so the defect is certified for every b with a*b = 0.
    let mut rng = SplitMix64::new(seed);
    let mut sampled = 0;
    let mut failures = 0;
    for stratum in 0..3 {
        for _ in 0..samples_per_stratum {
            let mut a: Vec<Scalar> =
                (0..d).map(|_| rng.scalar(FieldMode::Rational)).collect();
            if stratum >= 1 {
                a[ONE] = Scalar::zero();
            }
            if stratum >= 2 {
                a[U] = Scalar::zero();
            }
            sampled += 1;
            for b in alg.left_rep(&a).nullspace() {
                debug_assert!(alg.mul(&a, &b).iter().all(Scalar::is_zero));
                let defect =
                    add(&alg.mul(&delta.apply(&a), &b), &alg.mul(&a, &tau.apply(&b)));
                if defect.iter().any(|x| !x.is_zero()) {
                    failures += 1;
                }
            }
        }
    }

    ExampleZReport {
        defect_equals_sandwich,
        w_annihilates_radical,
        radical_nilpotent,
        sampled_first_factors: sampled,
        sampled_failures: failures,
    }
}

fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Exact infeasibility of the completion system for the example pair.
///
/// The system stacks `gamma(e_i e_j) = delta(e_i) e_j + e_i tau(e_j)` over
/// all basis pairs into 64 equations in the 16 entries of gamma. The rank
/// gap between the augmented and plain coefficient matrices certifies that
/// no completion exists, and the two forced values of `gamma(u)` — through
/// `u * 1` and through `1 * u` — exhibit the contradiction concretely.
#[derive(Debug, Clone)]
pub struct NoCompletionReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub augmented_rank: usize,
    pub forced_from_right: Vec<Scalar>,
    pub forced_from_left: Vec<Scalar>,
}

impl NoCompletionReport {
    pub fn rank_gap(&self) -> usize {
        self.augmented_rank - self.rank
    }

    pub fn forced_values_differ(&self) -> bool {
        self.forced_from_right != self.forced_from_left
    }
}

pub fn show_no_gamma() -> NoCompletionReport {
    let alg = example_algebra();
    let (delta, tau) = example_maps(&alg);
    let d = alg.dim();
    let mut m = Mat::zeros(d * d * d, d * d);
    let mut b = vec![Scalar::zero(); d * d * d];
    for i in 0..d {
        for j in 0..d {
            let prod = alg.mul(&alg.basis(i), &alg.basis(j));
            let rhs = add(
                &alg.mul(&delta.apply(&alg.basis(i)), &alg.basis(j)),
                &alg.mul(&alg.basis(i), &tau.apply(&alg.basis(j))),
            );
            for s in 0..d {
                let row = (i * d + j) * d + s;
                // gamma(prod)_s = sum_k gamma[s][k] * prod_k
                for (k, pk) in prod.iter().enumerate() {
                    if !pk.is_zero() {
                        *m.at_mut(row, s * d + k) = pk.clone();
                    }
                }
                b[row] = rhs[s].clone();
            }
        }
    }
    let sol = solve_affine(&m, &b);
    debug_assert!(!sol.is_feasible());
    let u = alg.basis(U);
    let forced_from_right = add(&delta.apply(&u), &alg.mul(&u, &tau.apply(alg.identity())));
    let forced_from_left = add(&alg.mul(&delta.apply(alg.identity()), &u), &tau.apply(&u));
    NoCompletionReport {
        rows: d * d * d,
        cols: d * d,
        rank: sol.rank,
        augmented_rank: sol.augmented_rank,
        forced_from_right,
        forced_from_left,
    }
}

/// The same one-element construction on the smallest genuine nest, where the
/// theory applies: multiplying by E12 from the left in delta and the right
/// in tau is realizable, while the crossed orientation is refuted with an
/// explicit witness pair.
#[derive(Debug, Clone)]
pub struct ContrastReport {
    pub straight_feasible: bool,
    pub straight_triple: Option<ImplementingTriple>,
    pub crossed_feasible: bool,
    pub crossed_witness: Option<ZWitness>,
}

pub fn nest_contrast() -> Result<ContrastReport, Error> {
    let alg = Arc::new(NestAlgebra::new(NestSpec::new(vec![1, 2])?));
    let e12 = alg.unit(alg.unit_index(0, 1).expect("corner unit"));
    let straight_delta = OpMap::left_mul(&alg, &e12);
    let straight_tau = OpMap::right_mul(&alg, &e12);
    let (straight_feasible, straight_triple) =
        match solve_rst(&straight_delta, &straight_tau)? {
            RstOutcome::Feasible(sol) => (true, Some(sol.triple)),
            RstOutcome::Infeasible(_) => (false, None),
        };
    let crossed_delta = OpMap::right_mul(&alg, &e12);
    let crossed_tau = OpMap::left_mul(&alg, &e12);
    let crossed = z_report(&crossed_delta, &crossed_tau)?;
    Ok(ContrastReport {
        straight_feasible,
        straight_triple,
        crossed_feasible: crossed.verdict == ZVerdict::Holds,
        crossed_witness: crossed.witness,
    })
}

/// One nest algebra's invariants against the example's.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CensusRow {
    pub nest: Vec<usize>,
    pub dim: usize,
    pub center_dim: usize,
    pub radical_dim: usize,
    pub matches_example: bool,
}

/// Census over every nest with ambient dimension up to `max_ambient` whose
/// algebra dimension equals the example's. Matching requires dimension,
/// center dimension, and radical dimension to agree simultaneously — the
/// three are isomorphism invariants, so a miss on any one of them separates
/// the algebras.
#[derive(Debug, Clone)]
pub struct CensusReport {
    pub example_dim: usize,
    pub example_center_dim: usize,
    pub example_radical_dim: usize,
    pub rows: Vec<CensusRow>,
    pub any_match: bool,
}

pub fn dimension_census(max_ambient: usize) -> CensusReport {
    let example = example_algebra();
    let (e_dim, e_center, e_radical) =
        (example.dim(), example.center_dim(), example.radical_dim());
    let mut rows = Vec::new();
    for n in 2..=max_ambient {
        // Every strictly increasing sequence of cut points ending at n:
        // subsets of {1, .., n-1}, encoded by bitmask, plus the final n.
        for mask in 0..(1u32 << (n - 1)) {
            let mut dims: Vec<usize> =
                (1..n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            dims.push(n);
            let alg = NestAlgebra::new(NestSpec::new(dims.clone()).expect("valid cuts"));
            if alg.dim() != e_dim {
                continue;
            }
            let center_dim = alg.center().len();
            let radical_dim = alg.radical_dim();
            rows.push(CensusRow {
                nest: dims,
                dim: alg.dim(),
                center_dim,
                radical_dim,
                matches_example: center_dim == e_center && radical_dim == e_radical,
            });
        }
    }
    let any_match = rows.iter().any(|r| r.matches_example);
    CensusReport {
        example_dim: e_dim,
        example_center_dim: e_center,
        example_radical_dim: e_radical,
        rows,
        any_match,
    }
}
