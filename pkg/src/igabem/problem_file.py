"""TOML problem files: curves, boundary conditions, method and refinement.

Reference schema (a transcription of the built-in annulus benchmark ships
in ``examples_data/annulus_a.toml``)::

    [problem]
    name = "annulus-a"

    [[curves]]
    degree = 3
    knots = [0.0, 0.0, 0.0, 0.0, 0.1667, ..., 1.0, 1.0, 1.0, 1.0]
    control_points = [[1.0, 0.0], [1.0, 1.0], ...]
    outward_sign = 1

    [[bc]]
    curve = 0            # index into curves
    type = "neumann"     # or "dirichlet"
    data = "const:0"     # neg_sum | const:<v> | harmonic:<c0,re1,im1,...>

    [method]
    name = "iga"         # iga | curvilinear | standard | iga-collocation
    degree = 3           # approximation degree (Lagrangian methods)

    [refinement]
    levels = 1
    base_elements = 6    # per-curve element count of the coarsest run

    [quadrature]
    order = 16

    [exact]              # optional: harmonic reference solution for errors
    harmonic = [0.0, 1.0, 0.0]

Data codes: ``neg_sum`` is ``-(x1 + x2)``; ``const:v`` a constant;
``harmonic:c0,re1,im1,...`` evaluates ``c0 + sum_m re_m Re(z^m) + im_m
Im(z^m)``; on Neumann parts the normal derivative of that field is used.
"""

from __future__ import annotations

import sys

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from igabem.assembly import FluxDatum, PointwiseDatum
from igabem.geometry import BsplineCurve
from igabem.splines import SplineSpace


class ProblemFileError(ValueError):
    """Malformed problem file."""


def _fail(path, section, message):
    raise ProblemFileError(f"{path}: [{section}] {message}")


def _harmonic_field(coeffs):
    coeffs = [float(c) for c in coeffs]
    c0, pairs = coeffs[0], coeffs[1:]
    if len(pairs) % 2:
        raise ProblemFileError("harmonic coefficients come in (re, im) pairs after c0")
    res = pairs[0::2]
    ims = pairs[1::2]

    def value(x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        out = c0 * np.ones_like(np.real(z))
        for m, (re, im) in enumerate(zip(res, ims), start=1):
            zm = z**m
            out = out + re * zm.real + im * zm.imag
        return out

    def gradient(x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        gx = np.zeros_like(np.real(z))
        gy = np.zeros_like(np.real(z))
        for m, (re, im) in enumerate(zip(res, ims), start=1):
            dz = m * z ** (m - 1)
            gx = gx + re * dz.real + im * dz.imag
            gy = gy + -re * dz.imag + im * dz.real
        return gx, gy

    return value, gradient


def parse_data_code(code: str, role: str):
    """Datum object for one data code string."""
    if code == "neg_sum":
        if role == "neumann":
            return FluxDatum(lambda x, y: (-np.ones_like(x), -np.ones_like(y)))
        return PointwiseDatum(lambda x, y: -(x + y))
    if code.startswith("const:"):
        v = float(code.split(":", 1)[1])
        return PointwiseDatum(lambda x, y: np.full_like(np.asarray(x, dtype=float), v))
    if code.startswith("harmonic:"):
        coeffs = [float(c) for c in code.split(":", 1)[1].split(",")]
        value, gradient = _harmonic_field(coeffs)
        if role == "neumann":
            return FluxDatum(gradient)
        return PointwiseDatum(value)
    raise ProblemFileError(f"unknown data code {code!r}")


def load_problem_file(path):
    """Parse a problem file into curves, bc specs and run configuration."""
    try:
        with open(path, "rb") as handle:
            doc = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc

    curves = []
    for idx, spec in enumerate(doc.get("curves", [])):
        section = f"curves[{idx}]"
        for key in ("degree", "knots", "control_points"):
            if key not in spec:
                _fail(path, section, f"missing field {key!r}")
        knots = np.asarray(spec["knots"], dtype=float)
        if np.any(np.diff(knots) < 0):
            _fail(path, section, "knots must be non-decreasing")
        try:
            space = SplineSpace(int(spec["degree"]) + 1, knots)
            curve = BsplineCurve(
                space,
                np.asarray(spec["control_points"], dtype=float),
                int(spec.get("outward_sign", 1)),
            )
        except ValueError as exc:
            _fail(path, section, str(exc))
        if "closed" in spec and bool(spec["closed"]) != curve.closed:
            _fail(
                path, section,
                f"closed = {spec['closed']} contradicts the control points "
                f"(first/last {'coincide' if curve.closed else 'differ'})",
            )
        curves.append(curve)
    if not curves:
        _fail(path, "curves", "at least one curve is required")

    bcs = []
    for idx, spec in enumerate(doc.get("bc", [])):
        section = f"bc[{idx}]"
        curve_idx = int(spec.get("curve", -1))
        if not 0 <= curve_idx < len(curves):
            _fail(path, section, f"curve index {curve_idx} out of range")
        role = spec.get("type")
        if role not in ("dirichlet", "neumann"):
            _fail(path, section, f"type must be dirichlet or neumann, got {role!r}")
        code = spec.get("data")
        try:
            datum = parse_data_code(code, role)
        except ProblemFileError as exc:
            _fail(path, section, str(exc))
        bcs.append({"curve": curve_idx, "role": role, "datum": datum})
    if len(bcs) != len(curves):
        _fail(path, "bc", "exactly one boundary condition per curve is required")

    method = doc.get("method", {})
    refinement = doc.get("refinement", {})
    quadrature = doc.get("quadrature", {})
    exact = doc.get("exact", None)
    exact_field = None
    if exact is not None:
        if "harmonic" not in exact:
            _fail(path, "exact", "only harmonic reference solutions are supported")
        exact_field = _harmonic_field(exact["harmonic"])

    base_elements = refinement.get("base_elements")
    if base_elements is None:
        base_elements = [c.breakpoints.size - 1 for c in curves]
    elif isinstance(base_elements, int):
        base_elements = [base_elements] * len(curves)

    return {
        "name": doc.get("problem", {}).get("name", "problem"),
        "curves": curves,
        "bcs": bcs,
        "method": method.get("name", "iga"),
        "degree": method.get("degree"),
        "levels": int(refinement.get("levels", 1)),
        "base_elements": [int(b) for b in base_elements],
        "quad_order": int(quadrature.get("order", 16)),
        "exact_field": exact_field,
    }
