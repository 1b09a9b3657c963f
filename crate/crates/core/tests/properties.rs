mod common;

use bhswitch::construct::{bush_type, fourier, kronecker};
use bhswitch::equiv::{certificate, equivalence_witness};
use bhswitch::sites::{
    check_genhall_form, check_rank2_conditions, find_fourier_sites, fourier_set_switch, genhall_rank2_layout,
    genhall_switch, Orientation, Rank2Parts,
};
use bhswitch::trades::{apply_trade, lincomb_nonzero_count, Trade};
use bhswitch::{BHMatrix, Cyc, Monomial};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scramble(h: &BHMatrix, seed: u64) -> BHMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = Monomial::random(h.n(), h.k(), &mut rng);
    let r = Monomial::random(h.n(), h.k(), &mut rng);
    h.apply_monomial(&l, &r).unwrap()
}

fn small_seeds() -> Vec<BHMatrix> {
    let f2 = fourier(2);
    vec![fourier(3), fourier(5), kronecker(&f2, &fourier(3)), bush_type(&fourier(2)).unwrap(), common::data("bh6_3a.txt")]
}

/// A literal generalized Hall matrix switched at block `m`, then rescaled
/// so the borders read literally again, with rows and columns shuffled
/// inside each block.
fn perturbed_genhall(seed: u64) -> BHMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = if rng.gen_bool(0.5) { common::data("bh12_3.txt") } else { common::data("bh12_4.txt") };
    let k = h.k();
    let n = h.n() / k - 1;
    for _ in 0..3 {
        let form = check_genhall_form(&h, k).unwrap();
        let m = rng.gen_range(0..k);
        let c = rng.gen_range(1..k) as u32;
        let mut g = genhall_switch(&h, &form, m, c).unwrap();
        for x in form.block_rows(m) {
            for j in 0..h.n() {
                g.shift(x, j, c as i64);
                g.shift(j, x, -(c as i64));
            }
        }
        h = g;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    for b in 0..k {
        let mut block: Vec<usize> = (k + b * n..k + (b + 1) * n).collect();
        for i in (1..block.len()).rev() {
            block.swap(i, rng.gen_range(0..=i));
        }
        perm.extend(block);
    }
    let cperm = perm.clone();
    BHMatrix::from_fn(h.n(), k, |i, j| h.get(perm[i], cperm[j]) as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificate_is_monomial_invariant(idx in 0usize..5, seed in any::<u64>()) {
        let h = &small_seeds()[idx];
        prop_assert_eq!(certificate(h).unwrap(), certificate(&scramble(h, seed)).unwrap());
    }

    #[test]
    fn witness_reproduces_scramble(idx in 0usize..5, seed in any::<u64>()) {
        let h = &small_seeds()[idx];
        let s = scramble(h, seed);
        let (l, r) = equivalence_witness(h, &s).unwrap();
        prop_assert_eq!(h.apply_monomial(&l, &r).unwrap(), s);
    }

    #[test]
    fn fourier_switches_stay_hadamard(seed in any::<u64>(), block in 0usize..3, c in 0u32..3) {
        let f3 = fourier(3);
        let h = scramble(&kronecker(&f3, &f3), seed);
        let sites = find_fourier_sites(&h).unwrap();
        prop_assert!(!sites.is_empty());
        for site in &sites {
            prop_assert!(fourier_set_switch(&h, site, block, c).unwrap().is_butson_hadamard());
        }
    }

    #[test]
    fn genhall_sums_follow_from_layout(seed in any::<u64>()) {
        let h = perturbed_genhall(seed);
        let k = h.k();
        let form = check_genhall_form(&h, k).unwrap();
        for i in 0..k {
            for j in 0..k {
                let want = if i == j { -&form.lambdas[i].conj() } else { Cyc::zero(k) };
                let (rs, cs) = form.block_sums(i, j);
                prop_assert!(rs.iter().chain(&cs).all(|x| *x == want));
            }
        }
        for m in 0..k {
            for c in 1..k as u32 {
                prop_assert!(genhall_switch(&h, &form, m, c).unwrap().is_butson_hadamard());
            }
            let lay = genhall_rank2_layout(&h, &form, m).unwrap();
            for z in 0..k as u32 {
                prop_assert!(bhswitch::sites::rank2_switch(&lay.matrix, &lay.form, z).unwrap().is_butson_hadamard());
            }
        }
    }

    #[test]
    fn rank2_orientation_duality(seed in any::<u64>(), genuine in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::data("bh12_3.txt");
        let form = check_genhall_form(&h, 3).unwrap();
        let lay = genhall_rank2_layout(&h, &form, rng.gen_range(0..3)).unwrap();
        let parts = if genuine {
            lay.form.parts.clone()
        } else {
            let mut idx: Vec<usize> = (0..12).collect();
            for i in (1..12).rev() {
                idx.swap(i, rng.gen_range(0..=i));
            }
            let split = |v: &[usize]| [v[..3].to_vec(), v[3..6].to_vec(), v[6..].to_vec()];
            let mut jdx = idx.clone();
            jdx.rotate_left(rng.gen_range(0..12));
            Rank2Parts { rows: split(&idx), cols: split(&jdx) }
        };
        let t = Rank2Parts { rows: parts.cols.clone(), cols: parts.rows.clone() };
        let col = check_rank2_conditions(&lay.matrix, &parts, Orientation::Column).is_ok();
        let row_t = check_rank2_conditions(&lay.matrix.transpose(), &t, Orientation::Row).is_ok();
        prop_assert_eq!(col, row_t);
        if genuine {
            prop_assert!(col);
        }
    }

    #[test]
    fn trades_survive_scrambling(seed in any::<u64>(), block in 0usize..3, c in 1i64..3) {
        let h = bush_type(&fourier(3)).unwrap();
        let mut g = h.clone();
        for i in block * 3..block * 3 + 3 {
            for j in block * 3..block * 3 + 3 {
                g.shift(i, j, c);
            }
        }
        let t = Trade::from_diff(&h, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Monomial::random(9, 3, &mut rng);
        let r = Monomial::random(9, 3, &mut rng);
        let hs = h.apply_monomial(&l, &r).unwrap();
        prop_assert!(apply_trade(&hs, &t.transport(&l, &r).unwrap()).is_ok());
    }

    #[test]
    fn lincomb_nonzero_lower_bound(idx in 0usize..5, seed in any::<u64>()) {
        let h = &small_seeds()[idx];
        let (n, k) = (h.n(), h.k());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = rng.gen_range(1..=n);
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            cols.swap(i, rng.gen_range(0..=i));
        }
        cols.truncate(b);
        let coeffs: Vec<Cyc> = (0..b)
            .map(|_| Cyc::from_ints(k, &(0..k).map(|_| rng.gen_range(-2..=2)).collect::<Vec<_>>()).unwrap())
            .collect();
        prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
        prop_assert!(lincomb_nonzero_count(h, &cols, &coeffs).unwrap() >= n.div_ceil(b));
    }
}
