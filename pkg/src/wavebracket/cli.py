"""Batch CLI: a thin client over the service layer.

Every subcommand builds the same pydantic request the HTTP endpoint takes,
then either calls the handler in-process (default) or POSTs it to a running
service (--server URL).  Outputs are deterministic JSON (sorted keys) plus
optional CSV artifacts; all numeric responses embed their provenance block.

Exit codes: 0 success, 2 validation/usage error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import urllib.error
import urllib.request
from pathlib import Path

from .errors import NUMERIC_ERRORS, VALIDATION_ERRORS
from .io import dumps, load_signal, save_signal, signal_to_json, write_csv
from .service import handlers as H
from .service import schemas as S

_ROUTES = {
    "lattice": ("/lattice", S.LatticeRequest, H.lattice_info),
    "embedding": ("/lattice/embedding", S.EmbeddingRequest, H.embedding_info),
    "bracket_time": ("/bracket/time", S.BracketTimeRequest, H.bracket_time_op),
    "bracket_fourier": ("/bracket/fourier", S.BracketFourierRequest, H.bracket_fourier_op),
    "bridge": ("/bracket/bridge", S.BridgeRequest, H.bridge_op),
    "filters": ("/filters/extract", S.FiltersExtractRequest, H.filters_extract_op),
    "cascade": ("/cascade", S.CascadeRequest, H.cascade_op),
    "norms": ("/norms/report", S.NormsRequest, H.norms_op),
    "norm_sweep": ("/norms/sweep", S.NormSweepRequest, H.norm_sweep_op),
    "norm_chain": ("/norms/chain", S.NormChainRequest, H.norm_chain_op),
    "verify": ("/verify", S.VerifyRequest, H.verify_op),
}


def _call(route: str, request, server: str | None):
    path, _, handler = _ROUTES[route]
    if server is None:
        response = handler(request)
        return json.loads(response.model_dump_json())
    body = request.model_dump_json().encode("utf-8")
    url = server.rstrip("/") + path
    req = urllib.request.Request(url, data=body,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode("utf-8", errors="replace")
        code = 3 if exc.code == 409 else 2
        print(f"service error {exc.code}: {detail}", file=sys.stderr)
        raise SystemExit(code)


def _parse_matrix(text: str) -> list[list[int]]:
    return json.loads(text)


def _signal_arg(text: str) -> S.SignalModel:
    """Signal argument: a path to .json/.wbg, or builtin:<name>[:<part>[:dim]]."""
    if text.startswith("builtin:"):
        parts = text.split(":")
        name = parts[1]
        part = parts[2] if len(parts) > 2 else "phi"
        dim = int(parts[3]) if len(parts) > 3 else 1
        return S.SignalModel(kind="builtin", name=name, part=part, dim=dim)
    obj = signal_to_json(load_signal(text))
    return S.SignalModel(**obj)


def _emit(payload: dict, out: str | None) -> None:
    text = dumps(payload)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _embedding_spec(args) -> S.EmbeddingSpec | None:
    if getattr(args, "embedding_matrix", None):
        return S.EmbeddingSpec(matrix=json.loads(args.embedding_matrix))
    if getattr(args, "matrix", None) is not None and getattr(args, "level", None) is not None:
        return S.EmbeddingSpec(
            dilation=S.DilationSpec(entries=_parse_matrix(args.matrix)),
            level=args.level)
    return None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wavebracket",
        description="bracket products, module norms, filters and wavelet "
                    "verification for lattice translation systems")
    ap.add_argument("--server", help="base URL of a running service; "
                                     "default is in-process execution")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for randomized sweeps (default 0)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="dilation matrix facts")
    ps = p.add_subparsers(dest="sub", required=True)
    for name in ("cosets", "offsets", "info"):
        q = ps.add_parser(name)
        q.add_argument("--matrix", required=True, help='e.g. "[[1,1],[1,-1]]"')
        q.add_argument("--out", "-o")
    q = ps.add_parser("embedding")
    q.add_argument("--matrix", required=True)
    q.add_argument("--level", type=int, default=0)
    q.add_argument("--out", "-o")

    p = sub.add_parser("bracket", help="bracket products and the bridge check")
    ps = p.add_subparsers(dest="sub", required=True)
    q = ps.add_parser("time")
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--matrix", help="dilation matrix for a level embedding")
    q.add_argument("--level", type=int, default=0)
    q.add_argument("--embedding-matrix", help="explicit embedding matrix JSON")
    q.add_argument("--window", type=int)
    q.add_argument("--out", "-o")
    q = ps.add_parser("fourier")
    q.add_argument("--p", required=True)
    q.add_argument("--q", required=True)
    q.add_argument("--matrix")
    q.add_argument("--level", type=int, default=0)
    q.add_argument("--embedding-matrix")
    q.add_argument("--trunc-R", type=int, default=8)
    q.add_argument("--grid-M", type=int, default=256)
    q.add_argument("--tail-tol", type=float)
    q.add_argument("--out", "-o")
    q = ps.add_parser("bridge")
    q.add_argument("--f", required=True)
    q.add_argument("--g", required=True)
    q.add_argument("--window", type=int)
    q.add_argument("--grid-M", type=int, default=256)
    q.add_argument("--grid-N", type=int, default=1024)
    q.add_argument("--trunc-R", type=int, default=8)
    q.add_argument("--out", "-o")

    p = sub.add_parser("filters", help="extract scaling/wavelet filters")
    ps = p.add_subparsers(dest="sub", required=True)
    for name in ("extract", "extract-fourier"):
        q = ps.add_parser(name)
        q.add_argument("--builtin")
        q.add_argument("--dim", type=int, default=1)
        q.add_argument("--phi")
        q.add_argument("--psi", action="append", default=[])
        q.add_argument("--matrix")
        q.add_argument("--window", type=int)
        q.add_argument("--grid-M", type=int, default=1024)
        q.add_argument("--trunc-R", type=int, default=8)
        q.add_argument("--emit-csv")
        q.add_argument("--out", "-o")

    p = sub.add_parser("cascade", help="iterate the refinement map")
    p.add_argument("--builtin")
    p.add_argument("--h", help="FilterSeq JSON path")
    p.add_argument("--matrix")
    p.add_argument("--iters", type=int, default=12)
    p.add_argument("--analytic", action="store_true",
                   help="iterate exactly on analytic pieces instead of a grid")
    p.add_argument("--half-width", type=float, default=4.0)
    p.add_argument("--grid-N", type=int, default=4096)
    p.add_argument("--save-final",
                   help="write the final iterate (.json or binary .wbg)")
    p.add_argument("--emit-csv")
    p.add_argument("--out", "-o")

    p = sub.add_parser("norms", help="module norms and level relations")
    ps = p.add_subparsers(dest="sub", required=True)
    q = ps.add_parser("report")
    q.add_argument("--signal", required=True)
    q.add_argument("--matrix", required=True)
    q.add_argument("--level", type=int, default=0)
    q.add_argument("--grid-M", type=int, default=256)
    q.add_argument("--trunc-R", type=int, default=8)
    q.add_argument("--tail-tol", type=float)
    q.add_argument("--out", "-o")
    q = ps.add_parser("sweep")
    q.add_argument("--signal", required=True)
    q.add_argument("--matrix", required=True)
    q.add_argument("--levels", default="-2:2", help="lo:hi inclusive")
    q.add_argument("--grid-M", type=int, default=256)
    q.add_argument("--trunc-R", type=int, default=8)
    q.add_argument("--emit-csv")
    q.add_argument("--out", "-o")
    q = ps.add_parser("chain")
    q.add_argument("--signal", required=True)
    q.add_argument("--matrix", required=True)
    q.add_argument("--level", type=int, default=1)
    q.add_argument("--grid-M", type=int, default=256)
    q.add_argument("--trunc-R", type=int, default=8)
    q.add_argument("--out", "-o")

    p = sub.add_parser("verify", help="multiwavelet verification")
    p.add_argument("--builtin")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--spec", help="JSON file: {psis: [...], dilation: {...}}")
    p.add_argument("--n-range", default="-2:2")
    p.add_argument("--recon-range")
    p.add_argument("--grid-M", type=int)
    p.add_argument("--trunc-R", type=int, default=8)
    p.add_argument("--tol-ortho", type=float, default=1e-5)
    p.add_argument("--tol-recon", type=float, default=1e-3)
    p.add_argument("--no-completeness", action="store_true")
    p.add_argument("--emit-csv")
    p.add_argument("--out", "-o")
    return ap


def _range_arg(text: str) -> tuple[int, int]:
    lo, hi = text.split(":")
    return int(lo), int(hi)


def _check_writable(args) -> None:
    """Fail fast (exit 2) when an output location cannot be written."""
    for attr in ("out", "emit_csv", "save_final"):
        target = getattr(args, attr, None)
        if not target or target == "-":
            continue
        parent = Path(target).resolve().parent
        if not parent.is_dir():
            raise ValueError(f"output directory {parent} does not exist")
        if not os.access(parent, os.W_OK):
            raise ValueError(f"output directory {parent} is not writable")


def _run(args) -> int:
    server = args.server
    _check_writable(args)
    if args.command == "lattice":
        if args.sub == "embedding":
            req = S.EmbeddingRequest(
                dilation=S.DilationSpec(entries=_parse_matrix(args.matrix)),
                level=args.level)
            _emit(_call("embedding", req, server), args.out)
            return 0
        req = S.LatticeRequest(
            dilation=S.DilationSpec(entries=_parse_matrix(args.matrix)))
        payload = _call("lattice", req, server)
        if args.sub == "cosets":
            payload = {"index_m": payload["index_m"],
                       "coset_reps": payload["coset_reps"]}
        elif args.sub == "offsets":
            payload = {"index_m": payload["index_m"],
                       "dual_fiber_offsets": payload["dual_fiber_offsets"]}
        _emit(payload, args.out)
        return 0

    if args.command == "bracket":
        if args.sub == "time":
            req = S.BracketTimeRequest(
                f=_signal_arg(args.f), g=_signal_arg(args.g),
                embedding=_embedding_spec(args), window=args.window)
            _emit(_call("bracket_time", req, server), args.out)
        elif args.sub == "fourier":
            req = S.BracketFourierRequest(
                p=_signal_arg(args.p), q=_signal_arg(args.q),
                embedding=_embedding_spec(args), trunc_R=args.trunc_R,
                grid_M=args.grid_M, tail_tol=args.tail_tol)
            _emit(_call("bracket_fourier", req, server), args.out)
        else:
            req = S.BridgeRequest(
                f=_signal_arg(args.f), g=_signal_arg(args.g),
                window=args.window, grid_M=args.grid_M,
                grid_N=args.grid_N, trunc_R=args.trunc_R)
            _emit(_call("bridge", req, server), args.out)
        return 0

    if args.command == "filters":
        req = S.FiltersExtractRequest(
            builtin=args.builtin, dim=args.dim,
            phi=_signal_arg(args.phi) if args.phi else None,
            psis=[_signal_arg(x) for x in args.psi] or None,
            dilation=(S.DilationSpec(entries=_parse_matrix(args.matrix))
                      if args.matrix else None),
            window=args.window, fourier=(args.sub == "extract-fourier"),
            grid_M=args.grid_M, trunc_R=args.trunc_R)
        payload = _call("filters", req, server)
        _emit(payload, args.out)
        if args.emit_csv:
            _filters_csv(payload, args.emit_csv)
        return 0

    if args.command == "cascade":
        req = S.CascadeRequest(
            builtin=args.builtin,
            h=(S.FilterSeqModel(**json.loads(Path(args.h).read_text()))
               if args.h else None),
            dilation=(S.DilationSpec(entries=_parse_matrix(args.matrix))
                      if args.matrix else None),
            iters=args.iters, grid=not args.analytic,
            half_width=args.half_width, n_samples=args.grid_N)
        payload = _call("cascade", req, server)
        _emit(payload, args.out)
        if args.save_final:
            if server is not None:
                print("--save-final needs in-process execution", file=sys.stderr)
                return 2
            from .service.handlers import cascade_final_signal
            save_signal(args.save_final, cascade_final_signal(req))
        if args.emit_csv:
            rows = [["iter", "step_l2", "x0_norm", "ortho_dev"]]
            for i in range(payload["iterations"]):
                rows.append([
                    i + 1, payload["step_l2"][i],
                    payload["x0_norms"][i] if payload["x0_norms"] else "",
                    payload["ortho_dev"][i] if payload["ortho_dev"] else "",
                ])
            write_csv(args.emit_csv, rows)
        return 0

    if args.command == "norms":
        dil = S.DilationSpec(entries=_parse_matrix(args.matrix))
        if args.sub == "report":
            req = S.NormsRequest(signal=_signal_arg(args.signal), dilation=dil,
                                 level=args.level, grid_M=args.grid_M,
                                 trunc_R=args.trunc_R, tail_tol=args.tail_tol)
            _emit(_call("norms", req, server), args.out)
        elif args.sub == "sweep":
            lo, hi = _range_arg(args.levels)
            req = S.NormSweepRequest(signal=_signal_arg(args.signal),
                                     dilation=dil,
                                     levels=list(range(lo, hi + 1)),
                                     grid_M=args.grid_M, trunc_R=args.trunc_R)
            payload = _call("norm_sweep", req, server)
            _emit(payload, args.out)
            if args.emit_csv:
                rows = [["level", "x_norm", "y_norm", "l2", "tail"]]
                for row in payload["rows"]:
                    rows.append([row["level"], row["x_norm"], row["y_norm"],
                                 row["l2"], row["tail"]])
                write_csv(args.emit_csv, rows)
        else:
            req = S.NormChainRequest(signal=_signal_arg(args.signal),
                                     dilation=dil, level=args.level,
                                     grid_M=args.grid_M, trunc_R=args.trunc_R)
            _emit(_call("norm_chain", req, server), args.out)
        return 0

    if args.command == "verify":
        psis = None
        dilation = None
        if args.spec:
            spec = json.loads(Path(args.spec).read_text())
            psis = [S.SignalModel(**m) for m in spec["psis"]]
            dilation = S.DilationSpec(**spec["dilation"])
        req = S.VerifyRequest(
            builtin=args.builtin, dim=args.dim, psis=psis, dilation=dilation,
            n_range=_range_arg(args.n_range),
            recon_range=_range_arg(args.recon_range) if args.recon_range else None,
            grid_M=args.grid_M, trunc_R=args.trunc_R,
            tol_ortho=args.tol_ortho, tol_recon=args.tol_recon,
            seed=args.seed, with_completeness=not args.no_completeness)
        payload = _call("verify", req, server)
        _emit(payload, args.out)
        if args.emit_csv:
            rows = [["i", "j", "m", "n", "residual", "tail", "excluded"]]
            for e in payload["ortho_matrix"]:
                rows.append([e["i"], e["j"], e["m"], e["n"],
                             e["residual"], e["tail"], e["excluded"]])
            write_csv(args.emit_csv, rows)
        return 0
    raise AssertionError("unreachable")


def _filters_csv(payload: dict, path: str) -> None:
    if payload.get("h_hat"):
        M = payload["h_hat"]["n_samples"][0]
        rows = [["zeta", "h_re", "h_im"]
                + sum([[f"g{k}_re", f"g{k}_im"]
                       for k in range(len(payload.get("g_hats") or []))], [])]
        zs = [-0.5 + i / M for i in range(M)]
        for i, z in enumerate(zs):
            row = [z, payload["h_hat"]["values"][i][0], payload["h_hat"]["values"][i][1]]
            for g in payload.get("g_hats") or []:
                row += [g["values"][i][0], g["values"][i][1]]
            rows.append(row)
        write_csv(path, rows)
        return
    bank = payload.get("bank")
    rows = [["filter", "index", "re", "im"]]
    for tap in bank["h"]["taps"]:
        rows.append(["h", " ".join(map(str, tap["index"])), tap["re"], tap["im"]])
    for k, g in enumerate(bank["g"]):
        for tap in g["taps"]:
            rows.append([f"g{k}", " ".join(map(str, tap["index"])),
                         tap["re"], tap["im"]])
    write_csv(path, rows)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return _run(args)
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except VALIDATION_ERRORS as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
