use proptest::prelude::*;

use oblique_vqe::linalg::{is_strictly_majorized_by_ones, schur_horn_unit_diag};
use oblique_vqe::manifold::{membership_violation, retract, tangent_project};
use oblique_vqe::models::qomm_value;
use oblique_vqe::quantum::{hamiltonian_matrix, resource_count, PauliHamiltonian, PauliTerm, QuantumState};
use oblique_vqe::sampling::{gaussian_matrix, random_hermitian, random_unitary, rng};
use oblique_vqe::{ComplexMatrix, Model};

fn pauli_word(q: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], q).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn resource_counts_match_formulas(p in 1u64..200, nu in 1u64..10_000) {
        let q = resource_count(Model::Qomm, p, nu);
        prop_assert_eq!((q.hamiltonian_circuits, q.regularization_circuits), (p * p * nu, p * (p - 1)));
        for m in [Model::Qtpm, Model::Ql1m, Model::Wql1m] {
            let r = resource_count(m, p, nu);
            prop_assert_eq!((r.hamiltonian_circuits, r.regularization_circuits), (p * nu, p * (p - 1) / 2));
        }
    }

    #[test]
    fn schur_horn_pins_unit_diagonal(raw in proptest::collection::vec(0.0f64..1.0, 1..10)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-3);
        let p = raw.len() as f64;
        let s: Vec<f64> = raw.iter().map(|x| x * p / total).collect();
        let v = schur_horn_unit_diag(&s).unwrap();
        let m = v.scale_columns(&s).matmul(&v.adjoint());
        for i in 0..s.len() {
            prop_assert!((m[(i, i)].re - 1.0).abs() <= 1e-10);
        }
        let unit = (&v.adjoint_mul(&v) - &ComplexMatrix::identity(s.len())).fro_norm();
        prop_assert!(unit <= 1e-12);
    }

    #[test]
    fn majorization_needs_unit_sum(raw in proptest::collection::vec(0.01f64..3.0, 2..8), extra in 0.05f64..1.0) {
        let m = raw.len() as f64;
        let sum: f64 = raw.iter().sum();
        let off: Vec<f64> = raw.iter().map(|x| x * (m + extra) / sum).collect();
        prop_assert!(!is_strictly_majorized_by_ones(&off));
        let on: Vec<f64> = raw.iter().map(|x| x * m / sum).collect();
        let mut sorted = on.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut acc = 0.0;
        let strict = sorted[..sorted.len() - 1].iter().enumerate().all(|(k, x)| {
            acc += x;
            acc < (k + 1) as f64 - 1e-9
        });
        if strict {
            prop_assert!(is_strictly_majorized_by_ones(&on));
        }
    }

    #[test]
    fn retraction_lands_on_manifold(n in 2usize..10, p in 1usize..5, seed in any::<u64>()) {
        let p = p.min(n);
        let x = gaussian_matrix(n, p, &mut rng(seed));
        let y = retract(&x).unwrap();
        prop_assert!(membership_violation(y.matrix()) <= 1e-12);
    }

    #[test]
    fn tangent_projection_is_tangent(n in 2usize..10, p in 1usize..5, seed in any::<u64>()) {
        let p = p.min(n);
        let mut r = rng(seed);
        let x = retract(&gaussian_matrix(n, p, &mut r)).unwrap();
        let g = gaussian_matrix(n, p, &mut r);
        let t = tangent_project(&x, &g).unwrap();
        for j in 0..p {
            let xj = ComplexMatrix::from_columns(n, &[x.matrix().column(j)]).unwrap();
            let tj = ComplexMatrix::from_columns(n, &[t.column(j)]).unwrap();
            prop_assert!(xj.real_inner(&tj).abs() <= 1e-12 * g.fro_norm().max(1.0));
        }
    }

    #[test]
    fn qomm_invariant_under_right_unitary(n in 2usize..9, p in 1usize..4, seed in any::<u64>()) {
        let p = p.min(n);
        let mut r = rng(seed);
        let a = random_hermitian(n, &mut r);
        let x = gaussian_matrix(n, p, &mut r);
        let v = random_unitary(p, &mut r);
        let f = qomm_value(&a, &x).unwrap();
        let g = qomm_value(&a, &x.matmul(&v)).unwrap();
        prop_assert!((f - g).abs() <= 1e-9 * f.abs().max(1.0));
    }

    #[test]
    fn pauli_apply_matches_dense(q in 1usize..5, words in proptest::collection::vec((0usize..4usize.pow(4), -1.0f64..1.0), 1..6), idx in 0usize..16) {
        let letters = ['I', 'X', 'Y', 'Z'];
        let terms: Vec<PauliTerm> = words
            .iter()
            .map(|&(code, c)| PauliTerm {
                pauli: (0..q).map(|k| letters[(code >> (2 * k)) & 3]).collect(),
                coeff: c,
            })
            .collect();
        let h = PauliHamiltonian::new(q, terms).unwrap();
        let psi = QuantumState::basis(q, idx % (1 << q));
        let direct = h.apply(psi.amplitudes());
        let dense = hamiltonian_matrix(&h).unwrap();
        let col = ComplexMatrix::from_columns(1 << q, &[psi.amplitudes().to_vec()]).unwrap();
        let via = dense.apply(&col);
        for (i, z) in direct.iter().enumerate() {
            prop_assert!((z - via[(i, 0)]).norm() <= 1e-12);
        }
    }

    #[test]
    fn pauli_words_parse(q in 1usize..6, w in pauli_word(5)) {
        let w: String = w.chars().take(q).collect();
        let h = PauliHamiltonian::new(q, vec![PauliTerm { pauli: w, coeff: 0.5 }]).unwrap();
        let m = hamiltonian_matrix(&h).unwrap();
        prop_assert!(m.matrix().hermitian_defect() <= 1e-14);
    }
}
