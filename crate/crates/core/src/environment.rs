//! World generation and orbital kinematics: the user point process, service
//! center-points, initial UAV states, neighbor sets and the per-step motion
//! of an orbiting UAV.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::Rng;

use crate::config::ScenarioConfig;
use crate::energy::optimal_velocity;

/// A 2D ground-plane point (m).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        libm::sqrt(dx * dx + dy * dy)
    }

    fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Ground users in a square area of side `area_side_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct UserSet {
    pub positions: Vec<Point>,
    pub area_side_m: f64,
}

/// One UAV: assigned service center, orbit geometry and angular position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UavState {
    pub index: usize,
    pub center: Point,
    pub radius_m: f64,
    pub height_m: f64,
    pub velocity_m_s: f64,
    /// Angular position on the orbit circle (rad).
    pub phase_rad: f64,
}

impl UavState {
    /// Horizontal position on the orbit circle.
    pub fn horizontal_position(&self) -> Point {
        Point::new(
            self.center.x + self.radius_m * libm::cos(self.phase_rad),
            self.center.y + self.radius_m * libm::sin(self.phase_rad),
        )
    }
}

/// Maximum neighbor set size: the surrounding hexagonal ring.
pub const MAX_NEIGHBORS: usize = 6;

/// Exact Poisson sample for any intensity: counts unit-exponential arrivals
/// until their sum exceeds `lambda`. O(lambda), no underflow for large means.
fn sample_poisson<R: Rng>(lambda: f64, rng: &mut R) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let mut t = 0.0;
    let mut n = 0usize;
    loop {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        t -= libm::log(u);
        if t > lambda {
            return n;
        }
        n += 1;
    }
}

/// Draw a homogeneous Poisson point process over the square `[0, side]^2`.
pub fn generate_users<R: Rng>(area_side_m: f64, density_per_km2: f64, rng: &mut R) -> UserSet {
    assert!(area_side_m > 0.0, "area side must be positive");
    assert!(density_per_km2 >= 0.0, "density must be non-negative");
    let area_km2 = area_side_m * area_side_m * 1e-6;
    let count = sample_poisson(density_per_km2 * area_km2, rng);
    let positions = (0..count)
        .map(|_| {
            Point::new(
                rng.gen_range(0.0..area_side_m),
                rng.gen_range(0.0..area_side_m),
            )
        })
        .collect();
    UserSet {
        positions,
        area_side_m,
    }
}

/// Side (m) of the square area that keeps the UAV density constant for a
/// fleet of `fleet_size` UAVs.
pub fn area_side_for_fleet(fleet_size: usize, uav_density_per_km2: f64) -> f64 {
    assert!(fleet_size >= 1);
    assert!(uav_density_per_km2 > 0.0);
    libm::sqrt(fleet_size as f64 / (uav_density_per_km2 * 1e-6))
}

fn nearest_center_sq(p: &Point, centers: &[Point]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (k, c) in centers.iter().enumerate() {
        let d = p.dist_sq(c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// K-means++ seeding followed by Lloyd iterations, capped at 100 rounds.
/// An emptied cluster is re-seeded at the user farthest from its nearest
/// centroid.
pub fn kmeans_centers<R: Rng>(users: &[Point], k: usize, rng: &mut R) -> Vec<Point> {
    assert!(k >= 1);
    assert!(!users.is_empty(), "k-means needs at least one user");

    // K-means++ initialization: first centroid uniform, the rest weighted by
    // squared distance to the nearest chosen centroid.
    let mut centers: Vec<Point> = Vec::with_capacity(k);
    centers.push(users[rng.gen_range(0..users.len())]);
    while centers.len() < k {
        let weights: Vec<f64> = users
            .iter()
            .map(|u| nearest_center_sq(u, &centers).1)
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            // All users coincide with existing centroids.
            centers.push(users[rng.gen_range(0..users.len())]);
            continue;
        }
        let mut target = rng.gen_range(0.0..total);
        let mut chosen = users.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                chosen = i;
                break;
            }
            target -= w;
        }
        centers.push(users[chosen]);
    }

    let mut assignment = vec![usize::MAX; users.len()];
    for _ in 0..100 {
        let mut changed = false;
        for (i, u) in users.iter().enumerate() {
            let (best, _) = nearest_center_sq(u, &centers);
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
        for (i, u) in users.iter().enumerate() {
            let s = &mut sums[assignment[i]];
            s.0 += u.x;
            s.1 += u.y;
            s.2 += 1;
        }
        for (c, (sx, sy, n)) in centers.iter_mut().zip(&sums) {
            if *n > 0 {
                *c = Point::new(sx / *n as f64, sy / *n as f64);
            }
        }
        // Re-seed any emptied centroid at the worst-covered user.
        for cluster in 0..k {
            if sums[cluster].2 == 0 {
                let far = users
                    .iter()
                    .enumerate()
                    .max_by(|(_, a), (_, b)| {
                        let da = nearest_center_sq(a, &centers).1;
                        let db = nearest_center_sq(b, &centers).1;
                        da.partial_cmp(&db).unwrap()
                    })
                    .map(|(i, _)| i)
                    .unwrap();
                centers[cluster] = users[far];
            }
        }
    }
    centers
}

/// Place one UAV per center: minimum radius, the configured initial height,
/// the energy-optimal velocity for that radius and a uniformly random phase.
pub fn init_uavs<R: Rng>(centers: &[Point], cfg: &ScenarioConfig, rng: &mut R) -> Vec<UavState> {
    assert!(!centers.is_empty());
    let params = cfg.energy_params();
    let velocity = optimal_velocity(cfg.r_min_m, &params);
    centers
        .iter()
        .enumerate()
        .map(|(index, &center)| UavState {
            index,
            center,
            radius_m: cfg.r_min_m,
            height_m: cfg.init_height_m,
            velocity_m_s: velocity,
            phase_rad: rng.gen_range(0.0..TAU),
        })
        .collect()
}

/// Advance the orbital phase by one timestep: the UAV covers an arc of
/// `v tau` along its circle. Counterclockwise for all UAVs.
pub fn advance_orbit(state: &UavState, tau_s: f64) -> UavState {
    let mut next = *state;
    if state.radius_m > 0.0 {
        let delta = state.velocity_m_s * tau_s / state.radius_m;
        next.phase_rad = libm::fmod(state.phase_rad + delta, TAU);
    }
    next
}

/// For each UAV, the up-to-six other UAVs with the closest center-points,
/// ordered by ascending center distance with ties broken by index.
pub fn neighbor_sets(centers: &[Point]) -> Vec<Vec<usize>> {
    assert!(!centers.is_empty());
    let n = centers.len();
    (0..n)
        .map(|i| {
            let mut others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            others.sort_by(|&a, &b| {
                let da = centers[i].dist_sq(&centers[a]);
                let db = centers[i].dist_sq(&centers[b]);
                da.partial_cmp(&db).unwrap().then(a.cmp(&b))
            });
            others.truncate(MAX_NEIGHBORS);
            others
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_density_gives_empty_set() {
        let mut rng = stream(1, "test", 0, 0);
        let users = generate_users(1000.0, 0.0, &mut rng);
        assert!(users.positions.is_empty());
    }

    #[test]
    fn poisson_count_statistics() {
        // side = sqrt(10) km, 10 users/km^2 => mean 100 per draw. The mean of
        // 500 draws must sit within 3 sigma of 100, and the positions inside
        // the square.
        let side = libm::sqrt(10.0) * 1000.0;
        let mut rng = stream(2, "test", 0, 0);
        let mut total = 0usize;
        let draws = 500;
        for _ in 0..draws {
            let users = generate_users(side, 10.0, &mut rng);
            total += users.positions.len();
            for p in &users.positions {
                assert!(p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side);
            }
        }
        let mean = total as f64 / draws as f64;
        let sigma = libm::sqrt(100.0 / draws as f64);
        assert!((mean - 100.0).abs() < 3.0 * sigma, "mean = {mean}");
    }

    #[test]
    fn fixed_seed_reproduces_point_set() {
        let a = generate_users(2000.0, 10.0, &mut stream(3, "test", 0, 0));
        let b = generate_users(2000.0, 10.0, &mut stream(3, "test", 0, 0));
        assert_eq!(a, b);
    }

    #[test]
    fn area_side_matches_density() {
        assert!((area_side_for_fleet(2, 0.2) - libm::sqrt(10.0) * 1000.0).abs() < 1e-6);
        assert!((area_side_for_fleet(20, 0.2) - 10_000.0).abs() < 1e-6);
        assert!((area_side_for_fleet(5, 0.2) - 5000.0).abs() < 1e-6);
    }

    fn objective(users: &[Point], centers: &[Point]) -> f64 {
        users.iter().map(|u| nearest_center_sq(u, centers).1).sum()
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let users = [
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(2.0, 6.0),
        ];
        let centers = kmeans_centers(&users, 1, &mut stream(4, "test", 0, 0));
        assert!((centers[0].x - 2.0).abs() < 1e-12);
        assert!((centers[0].y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_blobs_match_brute_force_partition() {
        // Two well-separated blobs of 5 users each; brute-force the best
        // 2-partition and compare objectives.
        let mut users = Vec::new();
        for k in 0..5 {
            users.push(Point::new(10.0 + k as f64, 12.0));
            users.push(Point::new(900.0 + k as f64, 880.0));
        }
        let centers = kmeans_centers(&users, 2, &mut stream(5, "test", 0, 0));
        // Brute force over all 2-partitions (by bitmask).
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << users.len()) - 1 {
            let (mut a, mut b): (Vec<Point>, Vec<Point>) = (Vec::new(), Vec::new());
            for (i, u) in users.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    a.push(*u);
                } else {
                    b.push(*u);
                }
            }
            let mean = |ps: &[Point]| {
                let n = ps.len() as f64;
                Point::new(
                    ps.iter().map(|p| p.x).sum::<f64>() / n,
                    ps.iter().map(|p| p.y).sum::<f64>() / n,
                )
            };
            let cs = [mean(&a), mean(&b)];
            let obj = objective(&users, &cs);
            if obj < best {
                best = obj;
            }
        }
        let got = objective(&users, &centers);
        assert!((got - best).abs() / best.max(1e-12) < 1e-9, "got {got}, best {best}");
        // One center per blob.
        let near_low = centers.iter().filter(|c| c.x < 100.0).count();
        assert_eq!(near_low, 1);
    }

    #[test]
    fn kmeans_objective_non_increasing() {
        let mut rng = stream(6, "test", 0, 0);
        let users: Vec<Point> = (0..200)
            .map(|_| Point::new(rng.gen_range(0.0..5000.0), rng.gen_range(0.0..5000.0)))
            .collect();
        // Re-run Lloyd manually from the k-means++ seeds to watch the
        // objective; the library call must at least match the seeded value.
        let seeded = kmeans_centers(&users, 6, &mut stream(6, "seed", 0, 0));
        let again = kmeans_centers(&users, 6, &mut stream(6, "seed", 0, 0));
        assert_eq!(seeded, again, "k-means must be deterministic under a fixed seed");

        // Objective non-increase, checked by one extra Lloyd sweep.
        let mut refined = seeded.clone();
        let mut sums = vec![(0.0, 0.0, 0usize); refined.len()];
        for u in &users {
            let (k, _) = nearest_center_sq(u, &refined);
            sums[k].0 += u.x;
            sums[k].1 += u.y;
            sums[k].2 += 1;
        }
        for (c, (sx, sy, n)) in refined.iter_mut().zip(&sums) {
            if *n > 0 {
                *c = Point::new(sx / *n as f64, sy / *n as f64);
            }
        }
        assert!(objective(&users, &refined) <= objective(&users, &seeded) + 1e-9);
    }

    #[test]
    fn more_clusters_than_distinct_users() {
        // Forces the empty-cluster/coincident-centroid path.
        let users = [Point::new(1.0, 1.0), Point::new(1.0, 1.0), Point::new(5.0, 5.0)];
        let centers = kmeans_centers(&users, 3, &mut stream(7, "test", 0, 0));
        assert_eq!(centers.len(), 3);
        for c in &centers {
            assert!(c.x.is_finite() && c.y.is_finite());
        }
    }

    #[test]
    fn init_uavs_defaults() {
        let cfg = ScenarioConfig::default();
        let centers = [Point::new(0.0, 0.0), Point::new(1000.0, 0.0), Point::new(0.0, 1000.0)];
        let uavs = init_uavs(&centers, &cfg, &mut stream(8, "test", 0, 0));
        assert_eq!(uavs.len(), 3);
        for (i, u) in uavs.iter().enumerate() {
            assert_eq!(u.index, i);
            assert_eq!(u.center, centers[i]);
            assert_eq!(u.radius_m, 50.0);
            assert_eq!(u.height_m, 100.0);
            assert!((u.velocity_m_s - 16.43).abs() < 0.05);
            assert!(u.phase_rad >= 0.0 && u.phase_rad < TAU);
        }
    }

    #[test]
    fn orbit_step_arc_length() {
        let cfg = ScenarioConfig::default();
        let mut state = init_uavs(&[Point::new(0.0, 0.0)], &cfg, &mut stream(9, "t", 0, 0))[0];
        state.phase_rad = 0.0;
        let next = advance_orbit(&state, 2.0);
        let expected = state.velocity_m_s * 2.0 / 50.0;
        assert!((next.phase_rad - expected).abs() < 1e-12);
        assert!((expected - 0.657).abs() < 5e-3);
    }

    #[test]
    fn hover_variant_keeps_phase() {
        let state = UavState {
            index: 0,
            center: Point::new(0.0, 0.0),
            radius_m: 50.0,
            height_m: 100.0,
            velocity_m_s: 0.0,
            phase_rad: 1.25,
        };
        assert_eq!(advance_orbit(&state, 2.0).phase_rad, 1.25);
    }

    #[test]
    fn orbit_closes_after_full_period() {
        let cfg = ScenarioConfig::default();
        let mut state = init_uavs(&[Point::new(100.0, 200.0)], &cfg, &mut stream(10, "t", 0, 0))[0];
        let tau = cfg.timestep_s;
        let steps = libm::ceil(TAU * state.radius_m / (state.velocity_m_s * tau)) as usize;
        let start = state.horizontal_position();
        for _ in 0..steps {
            state = advance_orbit(&state, tau);
            // Radius preserved exactly through every step.
            assert!(
                (state.horizontal_position().dist(&state.center) - state.radius_m).abs()
                    < 1e-9 * state.radius_m
            );
        }
        assert!(state.horizontal_position().dist(&start) < state.velocity_m_s * tau);
    }

    #[test]
    fn two_uavs_are_mutual_neighbors() {
        let sets = neighbor_sets(&[Point::new(0.0, 0.0), Point::new(500.0, 0.0)]);
        assert_eq!(sets, vec![vec![1], vec![0]]);
    }

    #[test]
    fn line_of_ten_takes_closest_six() {
        let centers: Vec<Point> = (0..10).map(|k| Point::new(k as f64, 0.0)).collect();
        let sets = neighbor_sets(&centers);
        assert_eq!(sets[0], vec![1, 2, 3, 4, 5, 6]);
        for (i, set) in sets.iter().enumerate() {
            assert!(!set.contains(&i));
            assert_eq!(set.len(), 6);
        }
    }

    #[test]
    fn distance_ties_break_by_index() {
        // A square: for UAV 0 the two side corners are equidistant.
        let centers = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
        ];
        let sets = neighbor_sets(&centers);
        assert_eq!(sets[0], vec![1, 2, 3]);
        assert_eq!(sets[3], vec![1, 2, 0]);
    }
}
