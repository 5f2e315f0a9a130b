//! Acceptance gate. Prints one PASS/FAIL line per criterion with its runtime
//! and limit, and exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use rand::rngs::StdRng;
use rand::Rng;
use relcf_core::cellspace::closure;
use relcf_core::cfun::pushforward_proj;
use relcf_core::demo::ex22_cellwise;
use relcf_core::ksheaf::{chi, chi_of_cellwise, k_equal, normal_form, realize, ElementaryTerm};
use relcf_core::xform::{
    compose_kernels, fm_transform, radon_pair, transform, IncidenceGeometry, Kernel,
};
use relcf_core::{
    CFunction, CellComplex, CellSet, LocallyClosedSet, RingModel, RingValue, VirtualSheaf,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn val(ring: &Arc<RingModel>, c: Vec<i64>) -> RingValue {
    RingValue::new(ring, c).unwrap()
}

// 1. Solution sheaf on the disc.
fn ex22() -> Check {
    let cellwise = ex22_cellwise().map_err(|e| e.to_string())?;
    let f = chi_of_cellwise(&cellwise);
    let x = f.complex();
    let poset = Poset::of(x);
    let mut cells = 0;
    for c in 0..poset.len() {
        let got = f
            .value(&poset.ids[c])
            .map_err(|e| e.to_string())?
            .coords()
            .to_vec();
        let expected = if poset.ids[c] == "o" {
            vec![0, 0]
        } else {
            vec![1, 0]
        };
        ensure!(
            got == expected,
            "cell {}: got {:?}, expected {:?}",
            poset.ids[c],
            got,
            expected
        );
        cells += 1;
    }
    let brute = coord_sum(
        2,
        (0..poset.len()).map(|c| {
            (
                poset.sign(c),
                f.value(&poset.ids[c]).unwrap().coords().to_vec(),
            )
        }),
    );
    ensure!(
        f.integrate().coords() == brute.as_slice(),
        "integral mismatch"
    );
    Ok(format!("{cells} cells, center 0, integral {:?}", brute))
}

// 2. Multiplication and duality in the rank/degree ring.
fn p1_ring() -> Check {
    let ring = p1();
    let mut g = rng(2);
    for _ in 0..1000 {
        let (b, d) = (g.gen_range(-1000..=1000), g.gen_range(-1000..=1000));
        let got = val(&ring, vec![1, b]).mul(&val(&ring, vec![1, d])).unwrap();
        ensure!(got.coords() == [1, b + d], "(1,{b})*(1,{d}) = {got}");
    }
    for _ in 0..1000 {
        let x = random_value(&mut g, &ring, 1000);
        let y = random_value(&mut g, &ring, 1000);
        let z = random_value(&mut g, &ring, 1000);
        let xy = x.mul(&y).unwrap();
        ensure!(
            xy.coords() == reference_mul(&ring, x.coords(), y.coords()),
            "{x}*{y} = {xy}"
        );
        let lhs = x.add(&z).unwrap().mul(&y).unwrap();
        let rhs = xy.add(&z.mul(&y).unwrap()).unwrap();
        ensure!(lhs == rhs, "not additive in the first slot at {x},{z},{y}");
        let lhs = y.mul(&x.add(&z).unwrap()).unwrap();
        let rhs = y.mul(&x).unwrap().add(&y.mul(&z).unwrap()).unwrap();
        ensure!(lhs == rhs, "not additive in the second slot at {y},{x},{z}");
        let (a, b) = (x.coords()[0], x.coords()[1]);
        ensure!(x.dual().coords() == [a, -b], "dual {x} = {}", x.dual());
        ensure!(x.dual().dual() == x, "dual not an involution at {x}");
    }
    Ok("1000 rank-one pairs, 1000 general triples".into())
}

/// Random complex of at most `max_cells` cells, drawn from a wider vertex range
/// than the shared generator so large sizes actually occur.
fn big_complex(g: &mut StdRng, max_cells: usize) -> Arc<CellComplex> {
    let vertices = g.gen_range(1..=11);
    let facet = g.gen_range(1..=5);
    let spec = random_simplicial_spec(g, vertices, facet, max_cells);
    Arc::new(CellComplex::from_spec(&spec).unwrap())
}

// 3. Every function is the index of its realization.
fn surjectivity() -> Check {
    let ring = p1();
    let mut g = rng(3);
    let mut largest = 0;
    for _ in 0..500 {
        let x = big_complex(&mut g, 200);
        largest = largest.max(x.len());
        let phi = random_function(&mut g, &x, &ring);
        ensure!(
            chi(&realize(&phi)) == phi,
            "chi(realize(phi)) != phi on {} cells",
            x.len()
        );
    }
    Ok(format!("500 functions, largest complex {largest} cells"))
}

/// A relatively open subset of `support`: the up-closure of a random subset,
/// taken inside the support.
fn random_open_part(g: &mut StdRng, support: &LocallyClosedSet) -> LocallyClosedSet {
    let x = support.complex();
    let seeds = CellSet::new(x, support.iter().filter(|_| g.gen_bool(0.3)));
    let up = seeds.up_closure().intersection(support).unwrap();
    LocallyClosedSet::try_from(up).unwrap()
}

// 4. Normal forms are invariant under splitting and under change of basis.
fn injectivity() -> Check {
    let ring = p1();
    let mut g = rng(4);
    let mut rewrites = 0;
    while rewrites < 1000 {
        let x = random_complex(&mut g, 60);
        let mut sheaf = random_vsheaf(&mut g, &x, &ring, 4);
        let reference = normal_form(&sheaf);
        for _ in 0..10 {
            let i = g.gen_range(0..sheaf.terms().len());
            let support = sheaf.terms()[i].1.support.clone();
            let u = random_open_part(&mut g, &support);
            sheaf = sheaf.split_at(i, &u).map_err(|e| e.to_string())?;
            rewrites += 1;
            ensure!(
                normal_form(&sheaf) == reference,
                "normal form changed after split {rewrites}"
            );
        }
    }
    let mut presentations = 0;
    for _ in 0..200 {
        let x = random_complex(&mut g, 60);
        let phi = random_function(&mut g, &x, &ring);
        let closed_terms = phi.to_closed_basis().into_iter().map(|(id, c)| {
            let cell = x.index_of(&id).unwrap();
            (
                1,
                ElementaryTerm::new(closure(&CellSet::new(&x, [cell])), c),
            )
        });
        let open_terms = phi.to_open_basis().into_iter().map(|(id, c)| {
            (
                1,
                ElementaryTerm::new(LocallyClosedSet::from_ids(&x, [id]).unwrap(), c),
            )
        });
        let closed = VirtualSheaf::new(&x, &ring, closed_terms).unwrap();
        let open = VirtualSheaf::new(&x, &ring, open_terms).unwrap();
        ensure!(
            normal_form(&closed) == normal_form(&open),
            "closed and open presentations differ"
        );
        ensure!(
            k_equal(&closed, &open).unwrap(),
            "k_equal disagrees with normal_form"
        );
        ensure!(
            normal_form(&open) == phi.to_open_basis(),
            "normal form is not the open basis"
        );
        presentations += 1;
    }
    Ok(format!(
        "{rewrites} split rewrites, {presentations} basis pairs"
    ))
}

// 5. Fourier–Mukai squares to minus the identity on rank and degree.
fn fm_inversion() -> Check {
    let ring = p1();
    let mut count = 0;
    for r in -25..=25 {
        for d in -25..=25 {
            let x = val(&ring, vec![r, d]);
            let twice = x.fm().unwrap().fm().unwrap();
            ensure!(twice.coords() == [-r, -d], "fm(fm({x})) = {twice}");
            count += 1;
        }
    }
    let mut g = rng(5);
    for _ in 0..500 {
        let x = random_complex(&mut g, 60);
        let phi = random_function(&mut g, &x, &ring);
        let twice = fm_transform(&fm_transform(&phi).unwrap()).unwrap();
        ensure!(twice == phi.neg(), "fm_transform squared is not -id");
    }
    Ok(format!("{count} elements, 500 functions"))
}

/// Kernel values as a matrix indexed by the oracle posets of both factors.
fn kernel_matrix(k: &Kernel, left: &Poset, right: &Poset) -> Vec<Vec<Vec<i64>>> {
    (0..left.len())
        .map(|s| {
            (0..right.len())
                .map(|t| {
                    k.value(&left.ids[s], &right.ids[t])
                        .unwrap()
                        .coords()
                        .to_vec()
                })
                .collect()
        })
        .collect()
}

fn reduce(ring: &Arc<RingModel>, c: Vec<i64>) -> Vec<i64> {
    val(ring, c).coords().to_vec()
}

// 6. Composition of kernels and Fubini, against explicit sums.
fn functoriality() -> Check {
    let ring = p1();
    let mut g = rng(6);
    let mut biggest = 0;
    for _ in 0..200 {
        let x = big_complex(&mut g, 50);
        let y = big_complex(&mut g, 50);
        let z = big_complex(&mut g, 50);
        biggest = biggest.max(x.len()).max(y.len()).max(z.len());
        let k1 = Kernel::from_fn(&x, &y, &ring, |_, _| sparse_value(&mut g, &ring));
        let k2 = Kernel::from_fn(&y, &z, &ring, |_, _| sparse_value(&mut g, &ring));
        let phi = random_function(&mut g, &x, &ring);
        let (px, py, pz) = (Poset::of(&x), Poset::of(&y), Poset::of(&z));
        let (m1, m2) = (kernel_matrix(&k1, &px, &py), kernel_matrix(&k2, &py, &pz));
        let f: Vec<Vec<i64>> = px
            .ids
            .iter()
            .map(|id| phi.value(id).unwrap().coords().to_vec())
            .collect();

        let composite = compose_kernels(&k1, &k2).map_err(|e| e.to_string())?;
        let two_step = transform(&k2, &transform(&k1, &phi).unwrap()).unwrap();
        let one_step = transform(&composite, &phi).unwrap();
        ensure!(one_step == two_step, "Phi_(K2 K1) != Phi_K2 Phi_K1");

        // composite kernel entry by entry: Σ_τ (−1)^τ K1(σ,τ) K2(τ,ρ)
        for s in 0..px.len() {
            for r in 0..pz.len() {
                let terms =
                    (0..py.len()).map(|t| (py.sign(t), reference_mul(&ring, &m1[s][t], &m2[t][r])));
                let expected = reduce(&ring, coord_sum(2, terms));
                let got = composite.value(&px.ids[s], &pz.ids[r]).unwrap();
                ensure!(
                    got.coords() == expected.as_slice(),
                    "composite kernel differs at ({}, {})",
                    px.ids[s],
                    pz.ids[r]
                );
            }
        }
        // transform by the triple sum Σ_τ Σ_σ (−1)^τ (−1)^σ K2(τ,ρ) K1(σ,τ) φ(σ)
        for r in 0..pz.len() {
            let mut terms = Vec::new();
            for t in 0..py.len() {
                for s in 0..px.len() {
                    let k = reference_mul(&ring, &m2[t][r], &m1[s][t]);
                    terms.push((py.sign(t) * px.sign(s), reference_mul(&ring, &k, &f[s])));
                }
            }
            let expected = reduce(&ring, coord_sum(2, terms));
            let got = two_step.value(&pz.ids[r]).unwrap();
            ensure!(
                got.coords() == expected.as_slice(),
                "transform differs at {}",
                pz.ids[r]
            );
        }
        // Fubini by the double sum Σ_σ Σ_τ (−1)^σ (−1)^τ K1(σ,τ)
        let terms = (0..px.len()).flat_map(|s| (0..py.len()).map(move |t| (s, t)));
        let double = coord_sum(
            2,
            terms.map(|(s, t)| (px.sign(s) * py.sign(t), m1[s][t].clone())),
        );
        ensure!(
            k1.function().integrate().coords() == double.as_slice(),
            "integrate(K) != double sum"
        );
        let pushed = pushforward_proj(k1.product(), k1.function()).unwrap();
        ensure!(
            pushed.integrate().coords() == double.as_slice(),
            "integrate(q_! K) != double sum"
        );
    }
    Ok(format!("200 instances, largest factor {biggest} cells"))
}

// 7. Structural invariants on randomized inputs.
fn structural() -> Check {
    let mut g = rng(7);
    let mut checks = 0usize;
    for round in 0..100 {
        let x = random_complex(&mut g, 60);
        let poset = Poset::of(&x);
        let n = poset.len();

        // regularity of every closed cell
        for c in 0..n {
            let s: i64 = (0..n)
                .filter(|&t| poset.leq[t][c])
                .map(|t| poset.sign(t))
                .sum();
            ensure!(s == 1, "closed cell {} has signed count {s}", poset.ids[c]);
        }
        // locally closed iff order-convex
        for _ in 0..5 {
            let set = random_subset(&mut g, &x, 0.3);
            let members: Vec<usize> = set.iter().collect();
            let convex = (0..n).all(|c| {
                set.contains(c)
                    || !(members.iter().any(|&a| poset.leq[a][c])
                        && members.iter().any(|&b| poset.leq[c][b]))
            });
            ensure!(
                set.is_locally_closed() == convex,
                "convexity disagrees in round {round}"
            );
            ensure!(
                LocallyClosedSet::try_from(set).is_ok() == convex,
                "try_from disagrees in round {round}"
            );
            let lc = random_locally_closed(&mut g, &x);
            ensure!(lc.is_locally_closed(), "closed ∩ open rejected");
            checks += 2;
        }
        for ring in ring_zoo() {
            let phi = random_function(&mut g, &x, &ring);
            let psi = random_function(&mut g, &x, &ring);
            let rho = random_function(&mut g, &x, &ring);
            // Möbius round trips
            ensure!(
                CFunction::from_closed_basis(&x, &ring, phi.to_closed_basis()).unwrap() == phi,
                "closed basis round trip"
            );
            ensure!(
                CFunction::from_open_basis(&x, &ring, phi.to_open_basis()).unwrap() == phi,
                "open basis round trip"
            );
            // D² = id
            ensure!(
                phi.verdier_dual().verdier_dual() == phi,
                "D^2 != id over {ring}"
            );
            // algebra axioms
            let one = CFunction::one(&x, &ring);
            let zero = CFunction::zero(&x, &ring);
            ensure!(
                phi.add(&psi).unwrap() == psi.add(&phi).unwrap(),
                "+ not commutative"
            );
            ensure!(
                phi.add(&psi).unwrap().add(&rho).unwrap()
                    == phi.add(&psi.add(&rho).unwrap()).unwrap(),
                "+ not associative"
            );
            ensure!(
                phi.add(&zero).unwrap() == phi && phi.add(&phi.neg()).unwrap() == zero,
                "additive identity or inverse"
            );
            ensure!(
                phi.mul(&psi).unwrap() == psi.mul(&phi).unwrap(),
                "* not commutative"
            );
            ensure!(
                phi.mul(&psi).unwrap().mul(&rho).unwrap()
                    == phi.mul(&psi.mul(&rho).unwrap()).unwrap(),
                "* not associative"
            );
            ensure!(phi.mul(&one).unwrap() == phi, "unit");
            ensure!(
                phi.mul(&psi.add(&rho).unwrap()).unwrap()
                    == phi.mul(&psi).unwrap().add(&phi.mul(&rho).unwrap()).unwrap(),
                "distributivity"
            );
            // integration is additive
            ensure!(
                phi.add(&psi).unwrap().integrate()
                    == phi.integrate().add(&psi.integrate()).unwrap(),
                "integration not additive"
            );
            checks += 9;
        }
        checks += n;
    }
    Ok(format!("{checks} checks over 100 complexes"))
}

// 8. Radon pair on the Fano plane against a double sum over the incidence table.
fn radon() -> Check {
    const LINES: [[usize; 3]; 7] = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    let ring = p1();
    let pair = radon_pair(&IncidenceGeometry::fano(), &ring).map_err(|e| e.to_string())?;
    let m = pair.composite_matrix().map_err(|e| e.to_string())?;
    for p in 0..7 {
        for q in 0..7 {
            // Σ_l K(q, l) K'(l, p) with K = K' = indicator of non-incidence
            let mut sum = 0;
            for line in LINES {
                let k = i64::from(!line.contains(&q));
                let k_prime = i64::from(!line.contains(&p));
                sum += k * k_prime;
            }
            let got = &m.entries[p][q];
            ensure!(
                got.coords() == [sum, 0],
                "entry ({p},{q}) = {got}, expected {sum}"
            );
        }
    }
    Ok("49 entries".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Check); 8] = [
        ("solution sheaf index on the disc", 1, ex22),
        ("rank/degree ring product and dual", 1, p1_ring),
        ("index of realization is the identity", 10, surjectivity),
        ("normal form invariance", 30, injectivity),
        ("Fourier-Mukai squares to -id", 5, fm_inversion),
        ("transform functoriality and Fubini", 60, functoriality),
        ("structural invariants", 60, structural),
        ("Fano Radon composite", 1, radon),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (status, detail) = match (&outcome, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over time limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {}: {status} {name} ({:.3}s, limit {limit}s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 8 criteria failed");
        ExitCode::FAILURE
    }
}
