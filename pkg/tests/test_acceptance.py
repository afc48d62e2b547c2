"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line (printed immediately and repeated
in the terminal summary).  Several tests take minutes; the whole module
runs in roughly half an hour on one core.
"""

import time
import timeit
import tracemalloc

import numpy as np
import pytest
import scipy.linalg as la
from scipy.integrate import quad_vec, solve_ivp

from dopo import fock
from dopo.cmop import (CmopSystem, adiabatic_steady, cmop_integrate, cmop_steady,
                       correlation_decomposition)
from dopo.cmop.core import pack, vacuum_state
from dopo.full import build_full_model, evolve_full, full_steady
from dopo.gsa import AT_PLUS, BT, gsa_cmop, gsa_cmop_dynamics, gsa_full, std_linearization
from dopo.liouville import EvolveConfig, build_liouvillian, unvec, vec
from dopo.meanfield import meanfield_dynamics, meanfield_steady
from dopo.meanfield import vacuum_state as mf_vacuum
from dopo.observables import default_grid, quadrature_variances, wigner_from_rho
from dopo.params import DopoParams

RESULTS = []


def report(number, ok, detail):
    line = f"acceptance {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def rel(a, b):
    return abs(a - b) / abs(b)


# --- 1 ---------------------------------------------------------------------

FULL_DIMS = {0.25: (6, 24), 0.5: (8, 30), 1.0: (8, 30), 1.5: (8, 30), 2.0: (8, 36), 3.0: (10, 36)}
CMOP_DIMS = {0.25: 30, 0.5: 30, 1.0: 30, 1.5: 30, 2.0: 36, 3.0: 40}


def test_1_oracle_agreement_strong_coupling():
    t0 = time.perf_counter()
    worst = {"photon_number": (0, None), "g2": (0, None), "chi_alpha_p": (0, None)}
    for sigma, dims in FULL_DIMS.items():
        p = DopoParams.from_sigma(sigma, chi=1.0)
        c = cmop_steady(p, CMOP_DIMS[sigma])
        o = full_steady(p, *dims)[2]
        for key, cv, fv in (("photon_number", c.photon_number, o.photon_number),
                            ("g2", c.g2, o.g2), ("chi_alpha_p", c.chi_alpha_p, p.chi * o.alpha_p.real)):
            e = rel(cv, fv)
            print(f"  sigma={sigma}: {key} c-MoP {cv:.6g} full {fv:.6g} rel {e:.3%}")
            if e > worst[key][0]:
                worst[key] = (e, sigma)
    runtime = time.perf_counter() - t0
    ok = all(v[0] <= 0.05 for v in worst.values()) and runtime < 600
    detail = ", ".join(f"{k} max {v[0]:.2%} (sigma={v[1]})" for k, v in worst.items())
    assert report(1, ok, f"{detail}; runtime {runtime:.0f} s (tol 5%, 600 s)")


# --- 2 ---------------------------------------------------------------------


def test_2a_diabatic_limit_gives_meanfield():
    # gamma_p / gamma_s = 0.01 with the fast rate scaled up
    p = DopoParams.from_sigma(0.8, chi=0.1, gamma_s=100.0, gamma_p=1.0)
    st = cmop_steady(p, 30).state
    mf = meanfield_steady(p)
    a = fock.annihilation(30)
    errs = {"n_s": rel(st.photon_number, mf.n_s),
            "m_s": rel(np.trace(a @ a @ st.rho_s), mf.m_s),
            "alpha_p": rel(st.alpha_p_lab, mf.alpha_p)}
    ok = max(errs.values()) <= 1e-3
    assert report("2a", ok, ", ".join(f"{k} rel {v:.2e}" for k, v in errs.items())
                  + " (tol 1e-3)")


def test_2b_adiabatic_limit_gives_effective_equation():
    p = DopoParams.from_sigma(0.8, chi=0.1, gamma_s=1.0, gamma_p=100.0)
    st = cmop_steady(p, 30).state
    td = fock.trace_distance(st.rho_s, adiabatic_steady(p, 30))
    assert report("2b", td <= 1e-2, f"trace distance {td:.2e} (tol 1e-2)")


# --- 3 ---------------------------------------------------------------------


def test_3_gsa_full_bt_is_meanfield():
    worst = 0.0
    for chi in (0.1, 1.0):
        for sigma in np.linspace(0.0, 3.0, 31):
            p = DopoParams.from_sigma(sigma, chi=chi)
            bt = next(b for b in gsa_full(p) if b.branch == BT)
            mf = meanfield_steady(p)
            pairs = [(bt.alpha_p, mf.alpha_p), (bt.n_s, mf.n_s), (bt.m_s, mf.m_s),
                     (bt.alpha_s, 0.0), (bt.n_p, 0.0), (bt.m_p, 0.0)]
            for x, y in pairs:
                worst = max(worst, abs(x - y) / max(abs(y), 1.0))
    assert report(3, worst <= 1e-8, f"max deviation {worst:.1e} over sigma in [0, 3] "
                  "(tol 1e-8)")


# --- 4 ---------------------------------------------------------------------


def test_4_squeezing_asymptotics():
    p = DopoParams.from_sigma(10.0, chi=0.01)
    out = []
    ok = True
    for name, solver in (("std-lin", std_linearization), ("gsa-full", gsa_full),
                         ("gsa-cmop", gsa_cmop)):
        plus = next(b for b in solver(p) if b.branch == AT_PLUS)
        vx, vp = quadrature_variances(plus.signal)
        ep, ex = rel(vp, 2 / 3), rel(vx, 2.0)
        ok &= ep <= 0.02 and ex <= 0.05
        out.append(f"{name} dp2 {vp:.4f} ({ep:.2%}) dx2 {vx:.4f} ({ex:.2%})")
    assert report(4, ok, "; ".join(out) + " (tol 2% / 5%)")


# --- 5 ---------------------------------------------------------------------


def _time_to_fraction(times, n, target):
    i = int(np.argmax(n >= target))
    return times[i - 1] + (target - n[i - 1]) * (times[i] - times[i - 1]) / (n[i] - n[i - 1])


def test_5_critical_slowing_down():
    steady = {0.1: cmop_steady(DopoParams.from_sigma(1.0, chi=0.1), 80).photon_number,
              0.05: cmop_steady(DopoParams.from_sigma(1.0, chi=0.05), 120).photon_number}
    ratio_n = steady[0.05] / steady[0.1]
    t95 = {}
    cfg = EvolveConfig(rtol=1e-7, atol=1e-9)
    for chi, ds, tmax in ((0.1, 60, 40.0), (0.05, 90, 80.0)):
        p = DopoParams.from_sigma(1.0, chi=chi)
        n_ss = cmop_steady(p, ds).photon_number
        t = np.linspace(0, tmax, int(10 * tmax) + 1)
        n = cmop_integrate(p, ds, t, cfg).photon_numbers()
        t95[chi] = _time_to_fraction(t, n, 0.95 * n_ss)
    ratio_t = t95[0.05] / t95[0.1]
    ok = abs(ratio_n - 2) <= 0.2 and abs(ratio_t - 2) <= 0.3
    assert report(5, ok, f"photon ratio {ratio_n:.4f} (2 +- 10%), t95 {t95[0.1]:.2f} -> "
                  f"{t95[0.05]:.2f}, ratio {ratio_t:.4f} (2 +- 15%)")


# --- 6 ---------------------------------------------------------------------


def test_6_linearization_divergence():
    sig = np.linspace(0.9, 0.999, 100)
    n = np.array([std_linearization(DopoParams.from_sigma(s, chi=0.01))[0].photon_number
                  for s in sig])
    mono = bool(np.all(np.diff(n) > 0))
    growth = n[-1] / n[0]
    p = DopoParams.from_sigma(1.0, chi=0.01)
    bt = next(b for b in gsa_cmop(p) if b.branch == BT)
    ref = cmop_steady(p, 300)
    e = rel(bt.photon_number, ref.photon_number)
    ok = mono and growth > 10 and np.isfinite(bt.photon_number) and e <= 0.3
    assert report(6, ok, f"std-lin monotone={mono}, n(0.999)/n(0.9)={growth:.1f} (>10); "
                  f"gsa-cmop {bt.photon_number:.3f} vs c-MoP {ref.photon_number:.3f} "
                  f"(dim_s 300, top population {ref.state.top_population():.1e}) "
                  f"rel {e:.1%} (tol 30%)")


# --- 7 ---------------------------------------------------------------------


def test_7a_spectral_reconstruction():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        gs, chi = rng.uniform(0.2, 3.0), rng.uniform(0.01, 2.0)
        at = rng.uniform(0, 0.98) * gs / chi * np.exp(1j * rng.uniform(0, 2 * np.pi))
        dec = correlation_decomposition(at, DopoParams(gamma_s=gs, chi=chi))
        for tau in (0.0, 0.25, 1.0, 4.0):
            worst = max(worst, np.abs(dec.propagator(tau) - la.expm(dec.matrix * tau)).max())
    assert report("7a", worst <= 1e-10, f"max error {worst:.1e} over 50 frames (tol 1e-10)")


def test_7b_memory_integral_oracle():
    p = DopoParams.from_sigma(1.0, chi=0.2)
    dim = 16
    at = meanfield_steady(p).alpha_p
    system = CmopSystem(p, dim, at)
    rho = fock.gaussian_dm(dim, 0, 0.3, 0.35)
    n_p, m_p = 0.04, 0.05 + 0.02j
    t_end = 4.0
    sol = solve_ivp(lambda t, y: system.signal_rhs(rho, y.reshape(dim, dim), 0.0, n_p, m_p)[1]
                    .ravel(), (0, t_end), np.zeros(dim * dim, complex), rtol=1e-11, atol=1e-13,
                    method="DOP853")
    h_ode = sol.y[:, -1].reshape(dim, dim)
    a = fock.annihilation(dim).astype(complex)
    L = build_liouvillian([(0.5 * p.chi, at * a.T @ a.T - np.conj(at) * a @ a)],
                          [(p.gamma_s, a)]).matrix.toarray()
    eye = np.eye(dim)
    da2 = a @ a - np.trace(a @ a @ rho) * eye
    dad2 = a.T @ a.T - np.trace(a.T @ a.T @ rho) * eye

    def integrand(tau):
        decay = np.exp(-p.gamma_p * tau)
        K = (np.conj(m_p) * decay * (da2 @ rho - rho @ da2) - n_p * decay * dad2 @ rho
             + (1 + n_p) * decay * rho @ dad2)
        return la.expm(L * tau) @ vec(K)

    h_int = unvec(quad_vec(integrand, 0, t_end, epsabs=1e-12, epsrel=1e-11)[0], dim)
    err = np.abs(h_ode - h_int).max()
    assert report("7b", err <= 1e-6, f"max |h_ode - h_memory| {err:.1e} (tol 1e-6)")


def test_7c_pump_backends_agree():
    p = DopoParams.from_sigma(1.0, chi=0.1)
    t = np.linspace(0, 20, 21)
    cfg = EvolveConfig(rtol=1e-10, atol=1e-12)
    m = cmop_integrate(p, 30, t, cfg, backend="moments")
    x = cmop_integrate(p, 30, t, cfg, backend="matrix", dim_p=11)
    err = 0.0
    for a, b in zip(m.states, x.states):
        err = max(err, np.abs(a.rho_s - b.rho_s).max(), abs(a.pump.alpha_p - b.pump.alpha_p),
                  abs(a.pump.n_p - b.pump.n_p), abs(a.pump.m_p - b.pump.m_p),
                  np.abs(a.pump.aux[:, :2] - b.pump.aux[:, :2]).max())
    assert report("7c", err <= 1e-6, f"max deviation {err:.1e} over t in [0, 20] (tol 1e-6)")


# --- 8 ---------------------------------------------------------------------

STATE_DIMS = {0.0: 10, 0.8: 40, 1.0: 70, 1.5: 160, 2.0: 320}
PEAK_FRACTION = 1e-2


def test_8_state_level_checks():
    lines, ok = [], True
    for sigma, ds in STATE_DIMS.items():
        st = cmop_steady(DopoParams.from_sigma(sigma, chi=0.1), ds).state
        rho = st.rho_s
        tr = abs(np.trace(rho) - 1)
        herm = np.abs(rho - rho.conj().T).max()
        mine = st.min_eigenvalue()
        amp = abs(st.alpha_s)
        x, _ = default_grid(rho, 201)
        w = wigner_from_rho(rho, x, x, warn_tol=1.0)
        norm = abs(w.normalization() - 1)
        asym = w.point_asymmetry()
        # a peak is a grid local maximum reaching 1% of the global maximum
        peaks = len(w.local_maxima(rel_threshold=PEAK_FRACTION))
        ripples = len(w.local_maxima(rel_threshold=1e-3)) - peaks
        want = 2 if sigma >= 1.5 else 1
        good = (tr <= 1e-10 and herm <= 1e-12 and mine >= -1e-6 and amp <= 1e-8
                and norm <= 1e-4 and asym <= 1e-8 and peaks == want)
        ok &= good
        lines.append(f"sigma={sigma}: trace err {tr:.0e}, herm {herm:.0e}, min eig {mine:.1e}, "
                     f"|<a>| {amp:.0e}, W norm err {norm:.0e}, asym {asym:.0e}, peaks {peaks}"
                     f"/{want} (+{ripples} ripples) -> {'ok' if good else 'bad'}")
    for ln in lines:
        print("  " + ln)
    failing = [ln.split(":")[0] for ln in lines if ln.endswith("bad")]
    assert report(8, ok, f"failing points: {failing or 'none'} (min eig >= -1e-6, "
                  "trace 1e-10, herm 1e-12, |<a>| 1e-8, W norm 1e-4, asym 1e-8, peak count "
                  "at 1% of max)")


# --- 9 ---------------------------------------------------------------------


def test_9_dynamics_cross_check():
    p = DopoParams.from_sigma(1.0, chi=0.1)
    t = np.array([0.0, 2.0, 5.0, 10.0, 20.0])
    cfg = EvolveConfig(rtol=1e-8, atol=1e-10)
    dp, ds = 6, 50
    states, _ = evolve_full(p, dp, ds, t, cfg)
    nf = np.array([fock.expect(fock.number(ds),
                               fock.partial_trace(r, (dp, ds), fock.SIGNAL)).real for r in states])
    nc = cmop_integrate(p, ds, t, cfg).photon_numbers()
    ng = np.array([b.photon_number for b in gsa_cmop_dynamics(p, t, cfg)])
    nm = np.array([s.n_s for s in meanfield_dynamics(p, mf_vacuum(), t, cfg)])
    ec = np.abs(nc[1:] - nf[1:]) / nf[1:]
    eg = np.abs(ng[1:] - nf[1:]) / nf[1:]
    em = np.abs(nm[1:] - nf[1:]) / nf[1:]
    ok = bool(np.all(ec <= 0.05) and np.all(eg < em))
    assert report(9, ok, "c-MoP rel err " + ", ".join(f"{e:.2%}" for e in ec) + " (tol 5%); "
                  "gsa-cmop " + ", ".join(f"{e:.1%}" for e in eg) + " vs mean-field "
                  + ", ".join(f"{e:.1%}" for e in em) + " at t = 2, 5, 10, 20")


# --- 10 --------------------------------------------------------------------


def _peak_memory(fn):
    tracemalloc.start()
    try:
        keep = fn()
        return tracemalloc.get_traced_memory()[1], keep
    finally:
        tracemalloc.stop()


def _per_call(fn, number):
    """Best of five timing rounds, as ``timeit`` recommends."""
    fn()
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def test_10_complexity():
    p = DopoParams.from_sigma(1.0, chi=0.1)

    def cmop_setup():
        system = CmopSystem(p, 120)
        y = pack(vacuum_state(120, system.alpha_tilde))
        return system, y, system.rhs_vector(0.0, y)

    def full_setup():
        model = build_full_model(p, 6, 120)
        y = vec(fock.tensor(fock.fock_dm(6, 0), fock.fock_dm(120, 0)))
        return model, y, model.liouvillian.matrix @ y

    mem_c, (system, yc, _) = _peak_memory(cmop_setup)
    mem_f, (model, yf, _) = _peak_memory(full_setup)
    t_c = _per_call(lambda: system.rhs_vector(0.0, yc), 50)
    mat = model.liouvillian.matrix
    t_f = _per_call(lambda: mat @ yf, 10)
    rm, rt = mem_f / mem_c, t_f / t_c
    ok = rm >= 10 and rt >= 10
    assert report(10, ok, f"peak memory {mem_c / 2**20:.1f} MiB vs {mem_f / 2**20:.1f} MiB "
                  f"(x{rm:.0f}); per RHS {t_c * 1e3:.2f} ms vs {t_f * 1e3:.2f} ms (x{rt:.1f}); "
                  f"unknowns {yc.size} vs {yf.size} (need x10)")
