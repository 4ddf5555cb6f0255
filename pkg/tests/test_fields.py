"""Field intensity and gradient checks against independent scalar oracles."""

import numpy as np
import pytest

from swarmlab.fields import (
    CORE_CLAMP_RADIUS,
    ObstacleSpec,
    PotentialField,
    SwarmFieldSpec,
    grad_phi,
    grad_phi_timed,
    phi_obstacle,
    phi_swarm,
    phi_total,
)


def oracle_phi_obstacle(q, p_o, v_o, v_s, d_safe, r_o):
    """Straight transcription of the three-branch obstacle intensity."""
    r = float(np.hypot(q[0] - p_o[0], q[1] - p_o[1]))
    v = max(v_o, v_s)
    if r <= d_safe:
        return v / d_safe**2
    if r <= r_o:
        return v / r**2
    return 0.0


def oracle_phi_swarm(q, center, v_s, r_s):
    r = float(np.hypot(q[0] - center[0], q[1] - center[1]))
    if r < CORE_CLAMP_RADIUS:
        return v_s / CORE_CLAMP_RADIUS**2
    if r <= r_s:
        return v_s / r**2
    return 0.0


def fd_grad(fld, q, h=1e-4):
    """Central-difference gradient of phi_total."""
    q = np.asarray(q, dtype=float)
    g = np.zeros(2)
    for k in range(2):
        e = np.zeros(2)
        e[k] = h
        g[k] = (phi_total(q + e, fld) - phi_total(q - e, fld)) / (2 * h)
    return g


def make_field(swarm_center=(0.0, 0.0), v_s=5.0, r_s=150.0, obstacles=()):
    return PotentialField(
        swarm=SwarmFieldSpec(center=np.array(swarm_center), speed=v_s, influence_radius=r_s),
        obstacles=tuple(obstacles),
    )


class TestObstacleIntensity:
    def test_middle_branch_value(self):
        # v_o=3, v_s=5, d_safe=20, R_o=100, r=30 -> max(3,5)/30^2 = 5/900
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([3.0, 0.0]),
                          influence_radius=100.0, safe_distance=20.0)
        got = phi_obstacle(np.array([30.0, 0.0]), ob, swarm_speed=5.0)
        assert got == pytest.approx(5.0 / 900.0, abs=0.0)

    def test_plateau_value(self):
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([3.0, 0.0]),
                          influence_radius=100.0, safe_distance=20.0)
        got = phi_obstacle(np.array([10.0, 0.0]), ob, swarm_speed=5.0)
        assert got == pytest.approx(5.0 / 400.0, abs=0.0)
        # plateau is flat
        got2 = phi_obstacle(np.array([0.0, 19.0]), ob, swarm_speed=5.0)
        assert got2 == got

    def test_zero_beyond_influence(self):
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.zeros(2),
                          influence_radius=100.0, safe_distance=20.0)
        assert phi_obstacle(np.array([100.1, 0.0]), ob, swarm_speed=5.0) == 0.0

    def test_faster_obstacle_wins_numerator(self):
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([0.0, 8.0]),
                          influence_radius=100.0, safe_distance=20.0)
        got = phi_obstacle(np.array([30.0, 0.0]), ob, swarm_speed=5.0)
        assert got == pytest.approx(8.0 / 900.0, abs=0.0)

    def test_random_probes_match_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            d_safe = rng.uniform(5.0, 40.0)
            r_o = d_safe + rng.uniform(10.0, 120.0)
            p_o = rng.uniform(-100.0, 100.0, size=2)
            v_o = rng.uniform(0.0, 20.0)
            v_s = rng.uniform(0.0, 20.0)
            ob = ObstacleSpec(position=p_o, velocity=np.array([v_o, 0.0]),
                              influence_radius=r_o, safe_distance=d_safe)
            q = p_o + rng.uniform(-1.5 * r_o, 1.5 * r_o, size=2)
            got = phi_obstacle(q, ob, swarm_speed=v_s)
            want = oracle_phi_obstacle(q, p_o, v_o, v_s, d_safe, r_o)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-15)


class TestSwarmIntensity:
    def test_inverse_square_value(self):
        spec = SwarmFieldSpec(center=np.zeros(2), speed=5.0, influence_radius=150.0)
        assert phi_swarm(np.array([5.0, 0.0]), spec) == pytest.approx(0.2, abs=0.0)

    def test_core_clamp(self):
        spec = SwarmFieldSpec(center=np.zeros(2), speed=5.0, influence_radius=150.0)
        cap = 5.0 / CORE_CLAMP_RADIUS**2
        assert phi_swarm(np.array([0.0, 0.0]), spec) == cap
        assert phi_swarm(np.array([0.5, 0.0]), spec) == cap
        # continuous at the clamp radius
        assert phi_swarm(np.array([CORE_CLAMP_RADIUS, 0.0]), spec) == pytest.approx(cap)

    def test_zero_beyond_influence(self):
        spec = SwarmFieldSpec(center=np.zeros(2), speed=5.0, influence_radius=150.0)
        assert phi_swarm(np.array([150.5, 0.0]), spec) == 0.0

    def test_random_probes_match_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            c = rng.uniform(-50.0, 50.0, size=2)
            v_s = rng.uniform(0.0, 30.0)
            r_s = rng.uniform(20.0, 200.0)
            spec = SwarmFieldSpec(center=c, speed=v_s, influence_radius=r_s)
            q = c + rng.uniform(-1.5 * r_s, 1.5 * r_s, size=2)
            assert phi_swarm(q, spec) == pytest.approx(
                oracle_phi_swarm(q, c, v_s, r_s), rel=1e-12, abs=1e-15)


class TestSuperposition:
    def test_total_is_sum_of_parts(self):
        rng = np.random.default_rng(3)
        obs = [
            ObstacleSpec(position=rng.uniform(-80, 80, 2),
                         velocity=rng.uniform(-10, 10, 2),
                         influence_radius=120.0, safe_distance=25.0)
            for _ in range(3)
        ]
        fld = make_field(swarm_center=(10.0, -5.0), v_s=7.0, obstacles=obs)
        pts = rng.uniform(-150, 150, size=(50, 2))
        want = phi_swarm(pts, fld.swarm)
        for ob in obs:
            want = want + phi_obstacle(pts, ob, 7.0)
        got = phi_total(pts, fld)
        np.testing.assert_array_equal(got, want)

    def test_nonnegative_everywhere(self):
        rng = np.random.default_rng(5)
        obs = [ObstacleSpec(position=rng.uniform(-80, 80, 2),
                            velocity=rng.uniform(-10, 10, 2))
               for _ in range(2)]
        fld = make_field(obstacles=obs)
        pts = rng.uniform(-500, 500, size=(2000, 2))
        assert np.all(phi_total(pts, fld) >= 0.0)

    def test_radial_monotonicity_single_source(self):
        # along a ray from an isolated source, intensity never increases
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([6.0, 0.0]),
                          influence_radius=140.0, safe_distance=30.0)
        fld = make_field(swarm_center=(1e6, 1e6), v_s=4.0, obstacles=[ob])
        for ang in np.linspace(0.0, 2 * np.pi, 7):
            u = np.array([np.cos(ang), np.sin(ang)])
            radii = np.linspace(0.5, 200.0, 400)
            vals = phi_total(radii[:, None] * u[None, :], fld)
            assert np.all(np.diff(vals) <= 1e-15)


class TestGradient:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(13)
        ob1 = ObstacleSpec(position=np.array([40.0, 10.0]), velocity=np.array([3.0, 4.0]),
                           influence_radius=120.0, safe_distance=18.0)
        ob2 = ObstacleSpec(position=np.array([-60.0, -20.0]), velocity=np.zeros(2),
                           influence_radius=90.0, safe_distance=25.0)
        fld = make_field(swarm_center=(0.0, 0.0), v_s=6.0, obstacles=[ob1, ob2])
        checked = 0
        while checked < 300:
            q = rng.uniform(-200, 200, size=2)
            # stay away from branch boundaries where the field is not smooth
            ok = True
            for p, lo, hi in [(fld.swarm.center, CORE_CLAMP_RADIUS, 150.0),
                              (ob1.position, 18.0, 120.0),
                              (ob2.position, 25.0, 90.0)]:
                r = np.linalg.norm(q - p)
                if abs(r - lo) < 0.5 or abs(r - hi) < 0.5 or r < 0.5:
                    ok = False
            if not ok:
                continue
            g = grad_phi(q, fld)
            g_fd = fd_grad(fld, q)
            scale = max(np.linalg.norm(g_fd), np.linalg.norm(g), 1e-12)
            assert np.linalg.norm(g - g_fd) / scale < 1e-5
            checked += 1

    def test_zero_on_plateau_and_outside(self):
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([5.0, 0.0]),
                          influence_radius=100.0, safe_distance=20.0)
        fld = make_field(swarm_center=(1e6, 0.0), obstacles=[ob])
        np.testing.assert_array_equal(grad_phi(np.array([5.0, 5.0]), fld), np.zeros(2))
        np.testing.assert_array_equal(grad_phi(np.array([300.0, 0.0]), fld), np.zeros(2))

    def test_boundary_uses_intensity_branch(self):
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([5.0, 0.0]),
                          influence_radius=100.0, safe_distance=20.0)
        fld = make_field(swarm_center=(1e6, 0.0), v_s=5.0, obstacles=[ob])
        # r == d_safe belongs to the plateau branch -> zero gradient
        np.testing.assert_array_equal(grad_phi(np.array([20.0, 0.0]), fld), np.zeros(2))
        # r == R_o belongs to the inverse-square branch -> analytic value
        g = grad_phi(np.array([100.0, 0.0]), fld)
        want = -2.0 * 5.0 * np.array([100.0, 0.0]) / 100.0**4
        np.testing.assert_allclose(g, want, rtol=1e-12)

    def test_gradient_peaks_just_outside_safe_distance(self):
        ob = ObstacleSpec(position=np.zeros(2), velocity=np.array([8.0, 0.0]),
                          influence_radius=120.0, safe_distance=30.0)
        fld = make_field(swarm_center=(1e6, 0.0), obstacles=[ob])
        radii = np.arange(2.0, 140.0, 1.0)
        pts = np.column_stack([radii, np.zeros_like(radii)])
        mags = np.linalg.norm(grad_phi(pts, fld), axis=1)
        assert radii[int(np.argmax(mags))] == 31.0

    def test_points_toward_source_is_repulsive(self):
        ob = ObstacleSpec(position=np.array([10.0, 20.0]), velocity=np.array([5.0, 0.0]),
                          influence_radius=100.0, safe_distance=15.0)
        fld = make_field(swarm_center=(1e6, 0.0), obstacles=[ob])
        q = np.array([50.0, 20.0])
        g = grad_phi(q, fld)
        # gradient points downhill direction of increase: toward the source
        assert np.dot(g, ob.position - q) > 0.0


class TestTimedGradient:
    def test_zero_times_match_static_gradient(self):
        ob = ObstacleSpec(position=np.array([40.0, -10.0]), velocity=np.array([-6.0, 2.0]),
                          influence_radius=120.0, safe_distance=25.0)
        fld = make_field(swarm_center=(-30.0, 5.0), obstacles=[ob])
        rng = np.random.default_rng(3)
        pts = rng.uniform(-150.0, 150.0, size=(40, 2))
        got = grad_phi_timed(pts, np.zeros(40), fld)
        np.testing.assert_array_equal(got, grad_phi(pts, fld))

    def test_obstacle_advanced_to_query_time(self):
        # at time t the obstacle field must equal a static field shifted by t*v
        ob = ObstacleSpec(position=np.array([50.0, 0.0]), velocity=np.array([-7.5, 3.0]),
                          influence_radius=120.0, safe_distance=25.0)
        fld = make_field(swarm_center=(1e6, 0.0), obstacles=[ob])
        rng = np.random.default_rng(9)
        for t in (0.5, 2.0, 7.0):
            moved = ObstacleSpec(position=ob.position + t * ob.velocity,
                                 velocity=ob.velocity,
                                 influence_radius=ob.influence_radius,
                                 safe_distance=ob.safe_distance)
            fld_t = make_field(swarm_center=(1e6, 0.0), obstacles=[moved])
            pts = ob.position + rng.uniform(-140.0, 140.0, size=(30, 2))
            got = grad_phi_timed(pts, np.full(30, t), fld)
            np.testing.assert_allclose(got, grad_phi(pts, fld_t), rtol=1e-12, atol=0.0)

    def test_swarm_term_ignores_time(self):
        fld = make_field(swarm_center=(0.0, 0.0), v_s=8.0, obstacles=())
        pts = np.array([[30.0, 0.0], [0.0, -60.0]])
        got = grad_phi_timed(pts, np.array([0.0, 50.0]), fld)
        np.testing.assert_array_equal(got, grad_phi(pts, fld))

    def test_shape_validation(self):
        fld = make_field()
        with pytest.raises(ValueError):
            grad_phi_timed(np.zeros(2), np.zeros(1), fld)      # single point
        with pytest.raises(ValueError):
            grad_phi_timed(np.zeros((3, 2)), np.zeros(2), fld)  # length mismatch


class TestValidation:
    def test_bad_safe_distance(self):
        with pytest.raises(ValueError):
            ObstacleSpec(position=np.zeros(2), velocity=np.zeros(2),
                         influence_radius=50.0, safe_distance=50.0)

    def test_bad_point_shape(self):
        fld = make_field()
        with pytest.raises(ValueError):
            phi_total(np.zeros(3), fld)
