"""Shared fixtures: the stripe benchmark problem and small helper domains."""

import numpy as np
import pytest

import nsinpaint as ns

STRIPE_SHAPE = (64, 64)
HOLE = (slice(24, 40), slice(24, 40))  # 16x16 hole


def stripe_arrays():
    """64x64 two-tone stripe (8-bit exact values) with a 16x16 hole mask.

    Background 51/255, band rows 30..33 at 255/255 with one-pixel ramps of
    140/255; hole pixels carry a 128/255 placeholder that the pipeline
    overwrites.
    """
    data = np.full(STRIPE_SHAPE, 51 / 255)
    data[29, :] = 140 / 255
    data[34, :] = 140 / 255
    data[30:34, :] = 1.0
    mask = np.zeros(STRIPE_SHAPE, dtype=bool)
    mask[HOLE] = True
    return np.where(mask, 128 / 255, data), mask


def stripe_uint8():
    """The same fixture as 8-bit arrays (image, mask), max value 255."""
    data, mask = stripe_arrays()
    return np.rint(data * 255).astype(np.uint8), (mask * 255).astype(np.uint8)


@pytest.fixture(scope="session")
def stripe_problem():
    data, mask = stripe_arrays()
    image = ns.GrayImage(data)
    domain = ns.extract_domain(image, mask)
    ops = ns.build_operators(domain)
    fact = ns.factor_preconditioner(domain)
    init = ns.harmonic_init(image, domain, ns.SolverConfig())
    return {
        "image": image,
        "mask": mask,
        "domain": domain,
        "ops": ops,
        "fact": fact,
        "init": init,
        "init_energy": ns.energy(ns.restrict(init, domain, "omega_prime"), ops),
    }


@pytest.fixture(scope="session")
def stripe_runs(stripe_problem):
    """The four descent runs plus the transport baseline, with per-iterate
    condition reports collected along each descent trajectory."""
    p = stripe_problem
    runs = {}
    for method in ("el", "h1", "h2", "h3"):
        reports = []
        fact = p["fact"]

        def cb(n, u0, state, g_el, _reports=reports, _fact=fact):
            if state.energy > 0.0:
                _reports.append(
                    ns.condition_report(
                        n, u0, g_el, _fact, state.energy, unrooted=True
                    )
                )

        cfg = ns.SolverConfig(
            gradient_kind=ns.GradientKind.from_method(method),
            iterate_callback=cb,
        )
        out, trace, stop = ns.minimize(p["init"], p["domain"], p["ops"], p["fact"], cfg)
        runs[method] = {"image": out, "trace": trace, "stop": stop, "reports": reports}
    out, trace, stop = ns.bbs_run(
        p["init"], p["domain"], p["ops"], ns.BbsConfig(), fact=p["fact"]
    )
    runs["bbs"] = {"image": out, "trace": trace, "stop": stop, "reports": []}
    return runs


def small_random_problem(rng, shape=(12, 12), hole=(slice(3, 9), slice(3, 9))):
    """Random image + block hole; returns (image, domain, ops, fact)."""
    image = ns.GrayImage(rng.random(shape))
    mask = np.zeros(shape, dtype=bool)
    mask[hole] = True
    domain = ns.extract_domain(image, mask)
    ops = ns.build_operators(domain)
    fact = ns.factor_preconditioner(domain)
    return image, domain, ops, fact


@pytest.fixture(scope="session")
def compare_run(tmp_path_factory):
    """One full CLI compare run on the stripe fixture (default settings)."""
    from nsinpaint.cli import main

    root = tmp_path_factory.mktemp("compare")
    pixels, mask8 = stripe_uint8()
    img_path = root / "stripe.pgm"
    mask_path = root / "mask.pgm"
    ns.imageio.write_pgm(img_path, pixels)
    ns.imageio.write_pgm(mask_path, mask8)
    out_dir = root / "out"
    code = main([
        "compare", "--input", str(img_path), "--mask", str(mask_path),
        "--out-dir", str(out_dir),
    ])
    return {
        "img_path": img_path,
        "mask_path": mask_path,
        "out_dir": out_dir,
        "exit_code": code,
    }
