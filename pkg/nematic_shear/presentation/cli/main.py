#!/usr/bin/env python3
from __future__ import annotations
import argparse
import logging
import sys

from nematic_shear.application.factory import make_usecases as build_usecases
from nematic_shear.application.use_cases import UseCases
from nematic_shear.domain.errors import ConfigError, NematicShearError
from nematic_shear.domain.services import build_json

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def make_usecases(args) -> UseCases:
    return build_usecases(args.config, args.out, args.jobs, args.seed)


def _emit(data) -> None:
    sys.stdout.write(build_json(data))


def cmd_validate(args):
    use = make_usecases(args)
    report = use.validate()
    _emit(report.to_dict())
    for check in report.failed():
        print(f"Falla: {check.name} (margen {check.margin:.6g})", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_bifurcation(args):
    use = make_usecases(args)
    diagram = use.bifurcation(args.ubar_max, args.samples)
    data = diagram.to_dict()
    _emit({
        "poles": data["poles"],
        "minima": data["minima"],
        "branches": [{"n": b.n, "side": b.side, "points": len(b.points)} for b in diagram.branches],
        "ubar_max": data["ubar_max"],
    })
    return 0


def cmd_stationary(args):
    use = make_usecases(args)
    profile = use.stationary(beta=args.beta, ubar=args.ubar, root=args.root, points=args.points)
    _emit(profile.metadata())
    return 0


def cmd_evans(args):
    use = make_usecases(args)
    window = None
    if args.lam_min is not None or args.lam_max is not None:
        lo, hi = use.config.windows.lam
        window = (args.lam_min if args.lam_min is not None else lo, args.lam_max if args.lam_max is not None else hi)
    _emit(use.evans(args.beta, window, args.grid))
    return 0


def cmd_eigs(args):
    use = make_usecases(args)
    _emit(use.eigs(beta=args.beta, interval=args.interval))
    return 0


def cmd_evolve(args):
    use = make_usecases(args)
    report = use.evolve(beta=args.beta, ubar=args.ubar, root=args.root, seed=args.seed, T=args.T)
    _emit(report.to_dict())
    return 0


def cmd_report(args):
    use = make_usecases(args)
    verdict = use.report()
    _emit(verdict)
    return 0 if verdict["ok"] else 1


def cmd_plot(args):
    use = make_usecases(args)
    written = use.plot()
    if not written:
        print("No hay artefactos CSV que dibujar en el directorio de salida", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def _level_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta", type=float, help="Nivel hamiltoniano beta")
    group.add_argument("--ubar", type=float, help="Velocidad de la pared; se resuelve 2D(beta)=ubar")
    p.add_argument("--root", type=int, default=0, help="Índice de la raíz (orden creciente en beta)")


def main(argv=None):
    p = argparse.ArgumentParser(prog="nematic-shear", description="Laboratorio numérico de flujos de cizalla nemáticos")
    p.add_argument("--config", help="Ruta al JSON de configuración")
    p.add_argument("--out", help="Directorio de salida (por defecto output.directory)")
    p.add_argument("--jobs", type=int, default=1, help="Hilos para barridos independientes")
    p.add_argument("--seed", type=int, default=0, help="Semilla de las perturbaciones")
    p.add_argument("-v", "--verbose", action="count", default=0, help="Más detalle en stderr (repetible)")
    sp = p.add_subparsers(dest="cmd", required=True)

    pv = sp.add_parser("validate", help="Validar parámetros del material")
    pv.set_defaults(func=cmd_validate)

    pb = sp.add_parser("bifurcation", help="Diagrama de bifurcación (ubar, beta)")
    pb.add_argument("--ubar-max", type=float, help="Máximo de ubar (por defecto windows.ubar)")
    pb.add_argument("--samples", type=int, default=40, help="Muestras uniformes de ubar")
    pb.set_defaults(func=cmd_bifurcation)

    ps = sp.add_parser("stationary", help="Perfil estacionario para beta o ubar")
    _level_args(ps)
    ps.add_argument("--points", type=int, help="Nodos de la malla (impar)")
    ps.set_defaults(func=cmd_stationary)

    pe = sp.add_parser("evans", help="Barrido de la función de Evans en lambda")
    pe.add_argument("--beta", type=float, required=True)
    pe.add_argument("--lam-min", type=float)
    pe.add_argument("--lam-max", type=float)
    pe.add_argument("--grid", type=int, help="Puntos del barrido")
    pe.set_defaults(func=cmd_evans)

    pg = sp.add_parser("eigs", help="Autovalores, monodromía y E_lambda")
    group = pg.add_mutually_exclusive_group(required=True)
    group.add_argument("--beta", type=float)
    group.add_argument("--interval", type=int, help="Usar el mínimo de D en este intervalo")
    pg.set_defaults(func=cmd_eigs)

    pt = sp.add_parser("evolve", help="Evolución linealizada y decaimiento de la energía")
    _level_args(pt)
    pt.add_argument("--T", type=float, help="Tiempo final")
    pt.set_defaults(func=cmd_evolve)

    pr = sp.add_parser("report", help="Reproducción completa con veredicto JSON")
    pr.set_defaults(func=cmd_report)

    pp = sp.add_parser("plot", help="Regenerar SVG desde los CSV existentes")
    pp.set_defaults(func=cmd_plot)

    args = p.parse_args(argv)
    logging.basicConfig(
        level=LOG_LEVELS[min(args.verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"Error de configuración: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"Error de E/S: {exc}", file=sys.stderr)
        return 2
    except NematicShearError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
