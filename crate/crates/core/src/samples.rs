//! Bundled example geometries and a random smooth-surface generator.
//!
//! The three stock fans (local P^2, local P^1, flat C^m) are used across the
//! test suites and ship as `.fan` files with the CLI.

use num_rational::BigRational;
use rand::Rng;

use crate::fan::{FanData, KahlerData, MomentPolytope};

fn rat(p: i64) -> BigRational {
    BigRational::from_integer(p.into())
}

/// Total space of O(-3) over P^2: rays (1,0,1), (0,1,1), (-1,-1,1), (0,0,1).
pub fn kp2_fan() -> FanData {
    FanData::from_i64(
        3,
        &[vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1], vec![0, 0, 1]],
        &[vec![0, 1, 3], vec![1, 2, 3], vec![0, 2, 3]],
    )
    .unwrap()
}

pub fn kp2_kahler() -> KahlerData {
    KahlerData::new(&kp2_fan(), vec![rat(0), rat(0), rat(0), rat(1)]).unwrap()
}

pub fn kp2_polytope() -> MomentPolytope {
    MomentPolytope::new(kp2_fan(), kp2_kahler())
}

/// Total space of O(-2) over P^1: rays (1,1), (-1,1), (0,1).
pub fn kp1_fan() -> FanData {
    FanData::from_i64(2, &[vec![1, 1], vec![-1, 1], vec![0, 1]], &[vec![0, 2], vec![1, 2]]).unwrap()
}

pub fn kp1_kahler() -> KahlerData {
    KahlerData::new(&kp1_fan(), vec![rat(0), rat(0), rat(1)]).unwrap()
}

pub fn kp1_polytope() -> MomentPolytope {
    MomentPolytope::new(kp1_fan(), kp1_kahler())
}

/// Flat space C^m as a toric CY: rays = standard basis, one maximal cone.
pub fn cm_fan(m: usize) -> FanData {
    assert!(m >= 2);
    let rays: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    FanData::from_i64(m, &rays, &[(0..m).collect()]).unwrap()
}

pub fn cm_kahler(m: usize) -> KahlerData {
    KahlerData::new(&cm_fan(m), vec![rat(0); m]).unwrap()
}

pub fn c3_polytope() -> MomentPolytope {
    MomentPolytope::new(cm_fan(3), cm_kahler(3))
}

/// Random smooth toric CY surface: rays (w, 1) over a run of consecutive
/// integers (smoothness forces |w_i - w_{i+1}| = 1 on adjacent cones),
/// presented in shuffled order with cones over adjacent pairs. The Kahler
/// vector is drawn by LP; the rare draw whose canonical relation basis
/// leaves the large-volume range is rejected and redrawn.
pub fn random_surface_fan(rng: &mut impl Rng) -> (FanData, KahlerData) {
    loop {
        let m = rng.gen_range(3..=6usize);
        let base = rng.gen_range(-4..=0i64);
        let mut order: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let rays: Vec<Vec<i64>> = order.iter().map(|&k| vec![base + k as i64, 1]).collect();
        let mut inv = vec![0usize; m];
        for (p, &k) in order.iter().enumerate() {
            inv[k] = p;
        }
        let cones: Vec<Vec<usize>> = (0..m - 1).map(|k| vec![inv[k], inv[k + 1]]).collect();
        let fan = FanData::from_i64(2, &rays, &cones).expect("generator produces valid fans");
        if let Ok(kahler) = KahlerData::auto(&fan) {
            return (fan, kahler);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generator_produces_validated_cy_fans() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let (fan, kahler) = random_surface_fan(&mut rng);
            assert!(crate::fan::is_smooth(&fan).all_smooth());
            let u = crate::fan::calabi_yau_vector(&fan).unwrap();
            let frame = crate::fan::adapted_basis(&fan, &u).unwrap();
            assert!(frame.basis_change.is_unimodular());
            assert!(kahler.q.iter().all(|&q| q > 0.0 && q < 1.0));
            let poly = MomentPolytope::new(fan, kahler);
            poly.interior_point().unwrap();
        }
    }
}
