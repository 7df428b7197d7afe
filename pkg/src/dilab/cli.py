"""Command line client for the laboratory service.

By default every command talks to an in-process instance of the HTTP app,
so no server needs to be running; --server switches to a remote instance.
Outputs are plain JSON and CSV files with no timestamps, so rerunning a
command with the same inputs reproduces the files byte for byte.

Exit codes: 0 success, 2 gate failure, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import json
import pathlib
import sys

import click

from .schemas import STATUS_GATE, STATUS_NUMERICAL, STATUS_OK

EXIT_OK = 0
EXIT_GATE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class TransportError(Exception):
    pass


def _post(server: str | None, path: str, payload: dict) -> dict:
    try:
        if server:
            import httpx

            with httpx.Client(base_url=server, timeout=600.0) as client:
                resp = client.post(path, json=payload)
        else:
            import warnings

            with warnings.catch_warnings():
                # starlette warns about its own httpx usage on import; that
                # is not actionable from a client session
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            with TestClient(app) as client:
                resp = client.post(path, json=payload)
    except Exception as exc:
        raise TransportError(f"request to {path} failed: {exc}") from exc
    if resp.status_code != 200:
        raise TransportError(
            f"service returned {resp.status_code} for {path}: {resp.text[:500]}"
        )
    return resp.json()


def _exit_for(status: str) -> int:
    if status == STATUS_OK:
        return EXIT_OK
    if status == STATUS_GATE:
        return EXIT_GATE
    if status == STATUS_NUMERICAL:
        return EXIT_NUMERICAL
    return EXIT_IO


def _load_json(path: str) -> dict:
    try:
        return json.loads(pathlib.Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise TransportError(f"cannot read {path}: {exc}") from exc


def _write_json(directory: str, name: str, payload: dict) -> pathlib.Path:
    out = pathlib.Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    target = out / name
    target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return target


def _tol_payload(rank_tol, residual_tol, purity_margin) -> dict:
    tol = {}
    if rank_tol is not None:
        tol["rank_tol"] = rank_tol
    if residual_tol is not None:
        tol["residual_tol"] = residual_tol
    if purity_margin is not None:
        tol["purity_margin"] = purity_margin
    return tol


def _finish(data: dict, lines: list[str]) -> None:
    for line in lines:
        click.echo(line)
    detail = data.get("detail")
    if detail:
        click.echo(f"detail: {detail}", err=True)
    sys.exit(_exit_for(data.get("status", "")))


def _fail_io(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_IO)


tol_options = [
    click.option("--rank-tol", type=float, default=None, help="singular value cutoff"),
    click.option("--residual-tol", type=float, default=None, help="residual ceiling"),
    click.option("--purity-margin", type=float, default=None, help="purity band width"),
    click.option("--server", default=None, help="remote service URL (default: in-process)"),
    click.option("--out", default=".", help="output directory"),
]


def _common(f):
    for opt in reversed(tol_options):
        f = opt(f)
    return f


@click.group()
def main() -> None:
    """Numerical laboratory for commuting pairs of pure contractions."""


@main.command()
@click.option("--seed", default=0, type=int, help="generator seed")
@click.option("--dim", default=4, type=int, help="matrix dimension (random kind)")
@click.option(
    "--kind",
    default="random",
    type=click.Choice(["random", "shift"]),
    help="random polynomial pair or truncated shift power pair",
)
@click.option("--shrink", default=0.9, type=float, help="norm target for random pairs")
@click.option("--n", default=4, type=int, help="truncation size (shift kind)")
@click.option("--a", default=1, type=int, help="first power (shift kind)")
@click.option("--b", default=2, type=int, help="second power (shift kind)")
@_common
def gen(seed, dim, kind, shrink, n, a, b, rank_tol, residual_tol, purity_margin, server, out):
    """Generate a commuting pair and write pair.json."""
    payload = {
        "kind": kind,
        "seed": seed,
        "dim": dim,
        "shrink": shrink,
        "n": n,
        "a": a,
        "b": b,
    }
    try:
        data = _post(server, "/gen", payload)
        lines = [f"status={data['status']}"]
        if data.get("pair"):
            target = _write_json(out, "pair.json", data["pair"])
            lines.append(f"dim={data['dim']} commutator_residual={data['commutator_residual']:.3e}")
            lines.append(f"wrote {target}")
    except TransportError as exc:
        _fail_io(exc)
    _finish(data, lines)


@main.command()
@click.option("--pair", "pair_path", default="pair.json", help="input pair file")
@_common
def certify(pair_path, rank_tol, residual_tol, purity_margin, server, out):
    """Certify purity, build the triple, and write certify.json + triple.json."""
    try:
        payload = {"pair": _load_json(pair_path)}
        tol = _tol_payload(rank_tol, residual_tol, purity_margin)
        if tol:
            payload["tolerances"] = tol
        data = _post(server, "/certify", payload)
        lines = [f"status={data['status']}"]
        target = _write_json(out, "certify.json", data)
        lines.append(f"wrote {target}")
        for key in ("cert_t1", "cert_t2", "cert_product"):
            cert = data.get(key)
            if cert:
                lines.append(
                    f"{key}: {cert['verdict']} (spectral radius {cert['spectral_radius']:.6f})"
                )
        if data.get("triple"):
            tri = _write_json(out, "triple.json", data["triple"])
            lines.append(f"wrote {tri}")
            lines.append(
                "residuals: relations=%.3e recurrence=%.3e symbol_product=%.3e"
                % (
                    data["relations_residual"],
                    data["recurrence_residual"],
                    data["symbol_product_residual"],
                )
            )
    except TransportError as exc:
        _fail_io(exc)
    _finish(data, lines)


@main.command()
@click.option("--pair", "pair_path", default="pair.json", help="input pair file")
@click.option("--triple", "triple_path", default=None, help="optional triple override")
@click.option("--truncation", default=8, type=int, help="truncation degree N")
@click.option("--full", is_flag=True, help="include dilation matrices in the output")
@_common
def dilate(pair_path, triple_path, truncation, full, rank_tol, residual_tol, purity_margin, server, out):
    """Dilate the pair on the truncated Hardy section and write dilation.json."""
    try:
        payload = {
            "pair": _load_json(pair_path),
            "degree": truncation,
            "include_matrices": full,
        }
        if triple_path:
            payload["triple"] = _load_json(triple_path)
        tol = _tol_payload(rank_tol, residual_tol, purity_margin)
        if tol:
            payload["tolerances"] = tol
        data = _post(server, "/dilate", payload)
        lines = [f"status={data['status']}"]
        if full and data.get("total_dim") and data["total_dim"] > 5000:
            click.echo(
                f"warning: embedding matrices at total dimension {data['total_dim']}",
                err=True,
            )
        target = _write_json(out, "dilation.json", data)
        lines.append(f"wrote {target}")
        if data.get("max_residual") is not None:
            lines.append(
                "residuals: max=%.3e isometry=%.3e minimal=%s"
                % (data["max_residual"], data["isometry_defect"], data["minimal"])
            )
    except TransportError as exc:
        _fail_io(exc)
    _finish(data, lines)


CSV_COLUMNS = (
    "w_re",
    "w_im",
    "z1_re",
    "z1_im",
    "z2_re",
    "z2_im",
    "res_phi",
    "res_psi",
    "res_tau",
)


def _write_csv(directory: str, points: list[dict]) -> pathlib.Path:
    outdir = pathlib.Path(directory)
    outdir.mkdir(parents=True, exist_ok=True)
    target = outdir / "variety.csv"
    rows = [",".join(CSV_COLUMNS)]
    for p in points:
        cells = []
        for col in CSV_COLUMNS:
            val = p.get(col)
            cells.append("" if val is None else repr(float(val)))
        rows.append(",".join(cells))
    target.write_text("\n".join(rows) + "\n")
    return target


@main.command()
@click.option("--pair", "pair_path", default=None, help="input pair file")
@click.option("--triple", "triple_path", default=None, help="input triple file")
@click.option("--radii", default=16, type=int, help="number of radial circles")
@click.option("--angles", default=64, type=int, help="points per circle")
@_common
def variety(pair_path, triple_path, radii, angles, rank_tol, residual_tol, purity_margin, server, out):
    """Sample the joint variety, cross-validate it, and write variety.csv."""
    if not pair_path and not triple_path:
        _fail_io(TransportError("provide --pair, --triple, or both"))
    try:
        payload = {"n_radii": radii, "angles": angles}
        if pair_path:
            payload["pair"] = _load_json(pair_path)
        if triple_path:
            payload["triple"] = _load_json(triple_path)
        tol = _tol_payload(rank_tol, residual_tol, purity_margin)
        if tol:
            payload["tolerances"] = tol
        data = _post(server, "/variety", payload)
        lines = [f"status={data['status']}"]
        if data.get("points") is not None:
            target = _write_csv(out, data["points"])
            lines.append(f"wrote {target} ({len(data['points'])} points)")
            lines.append(f"distinguished={data['distinguished']}")
            lines.append(
                "cross_validation: ok=%s max=%.3e over %d points"
                % (data["cross_ok"], data["cross_max_residual"], data["cross_count"])
            )
    except TransportError as exc:
        _fail_io(exc)
    _finish(data, lines)


def _poly_coeffs(poly_path: str | None, poly_seed: int | None, max_degree: int) -> list:
    if poly_path:
        raw = _load_json(poly_path)
        if isinstance(raw, dict):
            raw = raw.get("coeffs")
        if not isinstance(raw, list):
            raise TransportError(f"{poly_path} does not hold a coefficient grid")
        return raw
    from .variety import random_bivariate_poly

    seed = 0 if poly_seed is None else poly_seed
    coeffs = random_bivariate_poly(seed, max_degree).coeffs
    return [[(float(c.real), float(c.imag)) for c in row] for row in coeffs]


@main.command()
@click.option("--pair", "pair_path", default="pair.json", help="input pair file")
@click.option("--triple", "triple_path", default=None, help="optional triple override")
@click.option("--poly", "poly_path", default=None, help="polynomial coefficient file")
@click.option("--poly-seed", default=None, type=int, help="random polynomial seed")
@click.option("--max-degree", default=4, type=int, help="random polynomial degree cap")
@click.option("--radii", default=16, type=int, help="number of radial circles")
@click.option("--angles", default=64, type=int, help="points per circle")
@click.option("--vn-slack", default=1e-3, type=float, help="verdict slack")
@_common
def vncheck(pair_path, triple_path, poly_path, poly_seed, max_degree, radii, angles,
            vn_slack, rank_tol, residual_tol, purity_margin, server, out):
    """Compare ||p(T1,T2)|| with the sampled variety supremum; write vn.json."""
    try:
        payload = {
            "pair": _load_json(pair_path),
            "coeffs": _poly_coeffs(poly_path, poly_seed, max_degree),
            "n_radii": radii,
            "angles": angles,
            "vn_slack": vn_slack,
        }
        if triple_path:
            payload["triple"] = _load_json(triple_path)
        tol = _tol_payload(rank_tol, residual_tol, purity_margin)
        if tol:
            payload["tolerances"] = tol
        data = _post(server, "/vncheck", payload)
        lines = [f"status={data['status']}"]
        target = _write_json(out, "vn.json", data)
        lines.append(f"wrote {target}")
        if data.get("verdict"):
            lines.append(
                "verdict=%s lhs=%.9f rhs=%.9f slack=%.1e grid_bound=%.3e"
                % (
                    data["verdict"],
                    data["lhs"],
                    data["rhs"],
                    data["slack"],
                    data["grid_bound"],
                )
            )
    except TransportError as exc:
        _fail_io(exc)
    _finish(data, lines)


if __name__ == "__main__":
    main()
