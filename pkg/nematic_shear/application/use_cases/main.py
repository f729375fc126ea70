from __future__ import annotations
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from functools import cached_property
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np

from nematic_shear.application.ports import ArtifactsPort
from nematic_shear.domain.errors import DegenerateError, NematicShearError, NoRootError, RangeError
from nematic_shear.domain.models import (
    BifurcationDiagram,
    DecayReport,
    EigenReport,
    REGIME_UNSUPPORTED,
    RunConfig,
    StationaryProfile,
    ValidationReport,
)
from nematic_shear.domain.services import (
    BifurcationAnalysis,
    BifurcationMap,
    Coefficients,
    EvolutionSolver,
    Potential,
    ProfileBuilder,
    SpectralAnalysis,
    build_columns_csv,
    build_csv,
    build_json,
    composite_simpson,
)
from nematic_shear.domain.validation import validate_material
from nematic_shear.infrastructure.parsers import parse_columns, parse_csv
from nematic_shear.infrastructure.plotting import plot_bifurcation, plot_d_graph, plot_series
from .paths import OutputPaths

logger = logging.getLogger(__name__)

MapFn = Callable[..., Iterator]

# acceptance thresholds of the reproduction suite
IDENTITY_TOL = 1e-5
MONODROMY_TOL = 1e-5
REDUCTION_TOL = 1e-6
SHOOTING_TOL = 1e-6
DRIFT_TOL = 1e-7
SLOPE_TOL = 5e-3
E_LAMBDA_TOL = 1e-4
ZERO_EIGEN_TOL = 1e-7
FOLD_TOL = 0.1
SMALL_UBAR_SPREAD = 1.5
DET_TOL = 1e-8
LIOUVILLE_TOL = 1e-6
DOUBLING_DRIFT = 0.05
CONVERGENCE_RATIO = (3.0, 5.0)

# sample counts of the reproduction suite
IDENTITY_SAMPLES = 20
SHOOTING_SAMPLES = 10
LIOUVILLE_SAMPLES = 10
DECAY_SEEDS = 10
CONVERGENCE_GRIDS = (65, 129, 257)

BIFURCATION_HEADER = ("ubar", "beta", "interval", "side", "sign_Dprime")
D_GRAPH_HEADER = ("beta", "D", "Dprime")


class UseCases:
    def __init__(self, files: ArtifactsPort, config: RunConfig, paths: OutputPaths, jobs: int = 1, seed: int = 0):
        self.files = files
        self.config = config
        self.paths = paths
        self.jobs = max(1, int(jobs))
        self.seed = int(seed)

    # --- numerical stack, built lazily from the config -------------------

    @cached_property
    def coef(self) -> Coefficients:
        return Coefficients(self.config.material)

    @cached_property
    def potential(self) -> Potential:
        return Potential(self.coef, self.config.theta_window(), self.config.solver.potential_tol)

    @cached_property
    def bmap(self) -> BifurcationMap:
        return BifurcationMap(self.potential, self.config.solver, self.config.windows.beta_intervals)

    @cached_property
    def analysis(self) -> BifurcationAnalysis:
        return BifurcationAnalysis(self.bmap)

    @cached_property
    def builder(self) -> ProfileBuilder:
        return ProfileBuilder(self.bmap)

    @cached_property
    def spectral(self) -> SpectralAnalysis:
        return SpectralAnalysis(self.bmap, self.builder, self.config.solver)

    @cached_property
    def solver(self) -> EvolutionSolver:
        return EvolutionSolver(self.coef, self.config.evolution)

    @contextmanager
    def _pool(self) -> Iterator[MapFn]:
        if self.jobs == 1:
            yield map
            return
        with ThreadPoolExecutor(max_workers=self.jobs) as executor:
            yield executor.map

    def _write(self, name: str, content: str) -> Optional[str]:
        ext = os.path.splitext(name)[1].lstrip(".")
        if ext not in self.config.output.formats:
            return None
        path = self.paths.file(name)
        self.files.write_atomic(path, content)
        logger.info("escrito %s", path)
        return path

    def _require_supported(self) -> None:
        if self.bmap.equilibria.regime == REGIME_UNSUPPORTED:
            raise RangeError("el régimen gamma1 < |gamma2| no está soportado")

    # --- material --------------------------------------------------------

    def validate(self) -> ValidationReport:
        report = validate_material(self.config.material)
        data = report.to_dict()
        data["config"] = self.config.to_dict()
        self._write("validation.json", build_json(data))
        return report

    # --- bifurcation -----------------------------------------------------

    def d_samples(self) -> List[Tuple[float, float, float]]:
        """(beta, D, D') over every working interval, poles excluded."""
        rows = []
        for lo, hi in self.bmap.intervals():
            grid, _ = self.bmap.sampled(lo, hi)
            for b in grid:
                lv = self.bmap.level(b)
                rows.append((float(b), lv.D, lv.D_prime))
        return rows

    def bifurcation(self, ubar_max: Optional[float] = None, samples: int = 40) -> BifurcationDiagram:
        self._require_supported()
        ubar_max = float(ubar_max if ubar_max is not None else self.config.windows.ubar[1])
        with self._pool() as map_fn:
            diagram = self.analysis.branch_diagram(ubar_max, samples, map_fn)
        d_rows = self.d_samples()
        data = diagram.to_dict()
        data["equilibria"] = self.bmap.equilibria.to_dict()
        self._write("bifurcation.json", build_json(data))
        self._write("bifurcation.csv", build_csv(BIFURCATION_HEADER, diagram.rows()))
        self._write("d_graph.csv", build_csv(D_GRAPH_HEADER, d_rows))
        self._write("bifurcation.svg", plot_bifurcation(
            diagram.rows(), diagram.poles, [(m.ubar_n, m.beta_star) for m in diagram.minima],
        ))
        self._write("d_graph.svg", plot_d_graph([r[0] for r in d_rows], [r[1] for r in d_rows], diagram.poles))
        return diagram

    def resolve_beta(self, beta: Optional[float] = None, ubar: Optional[float] = None, root: int = 0) -> float:
        """beta given directly, or the root-th smallest level with 2D(beta) = ubar."""
        if beta is not None:
            return float(beta)
        if ubar is None:
            raise RangeError("se requiere beta o ubar")
        self._require_supported()
        roots = sorted(b for _, _, b in self.analysis.roots_at(float(ubar)))
        if not roots:
            raise NoRootError(f"no hay soluciones estacionarias para ubar={ubar:.17g} en la ventana")
        if not 0 <= root < len(roots):
            raise NoRootError(f"raíz {root} inexistente: hay {len(roots)} para ubar={ubar:.17g}")
        return roots[root]

    # --- stationary ------------------------------------------------------

    def stationary(self, beta: Optional[float] = None, ubar: Optional[float] = None, root: int = 0,
                   points: Optional[int] = None) -> StationaryProfile:
        beta = self.resolve_beta(beta, ubar, root)
        profile = self.builder.reconstruct(beta, points or self.config.solver.profile_points)
        self.builder.check(profile)
        drift = self.builder.conserved_drift(profile)
        meta = profile.metadata()
        meta.update({
            "dH1": drift.dH1, "dH2": drift.dH2, "dH3": drift.dH3,
            "residual": self.builder.residual(profile),
            "D": self.bmap.D(beta), "D_prime": self.bmap.D_prime(beta),
        })
        self._write("stationary.csv", build_columns_csv(profile.columns()))
        self._write("stationary.json", build_json(meta))
        self._write("stationary.svg", plot_series(profile.x, {"u": profile.u, "theta": profile.theta}, "x"))
        return profile

    # --- spectral --------------------------------------------------------

    def evans(self, beta: float, window: Optional[Tuple[float, float]] = None, grid: Optional[int] = None) -> Dict[str, Any]:
        lo, hi = window if window is not None else self.config.windows.lam
        grid = int(grid or self.config.solver.evans_lambda_grid)
        if hi > lo and grid >= 2:
            with self._pool() as map_fn:
                evaluations = self.spectral.scan(beta, np.linspace(lo, hi, grid), map_fn)
            roots = self.spectral.roots_from_scan(beta, evaluations)
        else:
            evaluations, roots = [], []
        rows = [(ev.lam, ev.E, ev.x_residual) for ev in evaluations]
        result = {
            "beta": float(beta),
            "window": [float(lo), float(hi)],
            "grid": grid,
            "roots": [{"lambda": lam, "residual": res} for lam, res in roots],
            "max_x_residual": max((r[2] for r in rows), default=0.0),
        }
        self._write("evans_scan.csv", build_csv(("lambda", "E", "x_residual"), rows))
        self._write("evans_roots.json", build_json(result))
        if rows:
            self._write("evans.svg", plot_series([r[0] for r in rows], {"E": [r[1] for r in rows]}, "lambda"))
        return result

    def eigs(self, beta: Optional[float] = None, interval: Optional[int] = None) -> Dict[str, Any]:
        """Eigenvalue report; with an interval index the level is that interval's minimum of D."""
        self._require_supported()
        slope = None
        if interval is not None:
            minimum = self.analysis.find_minimum(int(interval))
            if minimum is None:
                raise NoRootError(f"D no tiene mínimo en el intervalo {interval}")
            beta = minimum.beta_star
        if beta is None:
            raise RangeError("se requiere beta o un intervalo")
        with self._pool() as map_fn:
            report: EigenReport = self.spectral.eigen_report(
                beta, self.config.windows.lam, self.config.solver.evans_lambda_grid, map_fn,
            )
        data: Dict[str, Any] = {"report": report.to_dict(), "monodromy": self.spectral.monodromy(beta).to_dict()}
        try:
            data["evans_lambda"] = self.spectral.evans_lambda_derivative(beta).to_dict()
            if interval is not None:
                slope = self.spectral.eigenvalue_slope(beta)
                data["eigenvalue_slope"] = slope.to_dict()
        except DegenerateError as exc:
            logger.warning("%s", exc)
            data["evans_lambda"] = {"skipped": str(exc)}
        self._write("eigs.json", build_json(data))
        return data

    # --- evolution -------------------------------------------------------

    def evolve(self, beta: Optional[float] = None, ubar: Optional[float] = None, root: int = 0,
               seed: Optional[int] = None, T: Optional[float] = None) -> DecayReport:
        beta = self.resolve_beta(beta, ubar, root)
        seed = self.seed if seed is None else int(seed)
        profile = self.builder.reconstruct(beta, self.config.solver.evolution_points)
        self.builder.check(profile)
        report, final = self.solver.decay_report(profile, T=T, seed=seed)
        trace = list(final.energy_trace)
        self._write("evolve_trace.csv", build_csv(("t", "E_b"), trace))
        self._write("evolve_fields.csv", build_columns_csv(self.solver.terminal_fields(final)))
        self._write("evolve.json", build_json(report.to_dict()))
        self._write("evolve.svg", plot_series([p[0] for p in trace], {"E_b": [p[1] for p in trace]}, "t", logy=True))
        return report

    def small_ubar_sweep(self, ubars=(0.1, 0.05, 0.025)) -> List[Dict[str, Any]]:
        out = []
        for ubar in ubars:
            beta = self.resolve_beta(ubar=ubar)
            profile = self.builder.reconstruct(beta, self.config.solver.profile_points)
            out.append(self.solver.small_ubar_bounds(profile).to_dict())
        return out

    # --- plots from existing artifacts -----------------------------------

    def plot(self) -> List[str]:
        written: List[str] = []

        def columns(name: str) -> Optional[Dict[str, np.ndarray]]:
            text = self.files.read(self.paths.file(name))
            return parse_columns(text) if text else None

        bif = self.files.read(self.paths.file("bifurcation.csv"))
        if bif:
            _, raw = parse_csv(bif)
            rows = [(float(u), float(b), int(n), side, int(s)) for u, b, n, side, s in raw]
            written.append(self._write("bifurcation.svg", plot_bifurcation(rows, [], [])))
        d = columns("d_graph.csv")
        if d is not None:
            written.append(self._write("d_graph.svg", plot_d_graph(d["beta"], d["D"], [])))
        prof = columns("stationary.csv")
        if prof is not None:
            written.append(self._write("stationary.svg", plot_series(prof["x"], {"u": prof["u"], "theta": prof["theta"]}, "x")))
        scan = columns("evans_scan.csv")
        if scan is not None and scan["lambda"].size:
            written.append(self._write("evans.svg", plot_series(scan["lambda"], {"E": scan["E"]}, "lambda")))
        trace = columns("evolve_trace.csv")
        if trace is not None:
            written.append(self._write("evolve.svg", plot_series(trace["t"], {"E_b": trace["E_b"]}, "t", logy=True)))
        return [w for w in written if w]

    # --- one-shot reproduction -------------------------------------------

    @staticmethod
    def _run_check(name: str, fn: Callable[[], Tuple[bool, Any, str]]) -> Dict[str, Any]:
        try:
            passed, measured, detail = fn()
        except NematicShearError as exc:
            logger.warning("check %s: %s", name, exc)
            return {"name": name, "status": "fail", "measured": None, "detail": str(exc)}
        return {"name": name, "status": "pass" if passed else "fail", "measured": measured, "detail": detail}

    @staticmethod
    def _skip(name: str, reason: str) -> Dict[str, Any]:
        return {"name": name, "status": "skipped", "measured": None, "detail": reason}

    def _sample_levels(self, count: int = IDENTITY_SAMPLES) -> List[float]:
        """count levels over the first interval and both sides of the fold in the second."""
        _, hi = self.bmap.interval(0)
        minimum = self.analysis.find_minimum(1) if len(self.bmap.intervals()) > 1 else None
        if minimum is None:
            return [float(hi * f) for f in np.linspace(0.05, 0.95, count)]
        lo1, hi1 = self.bmap.interval(1)
        first = count // 2
        below = (count - first) // 2
        above = count - first - below
        star = minimum.beta_star
        levels = [hi * f for f in np.linspace(0.05, 0.95, first)]
        levels += [lo1 + f * (star - lo1) for f in np.linspace(0.1, 0.9, below)]
        levels += [star + f * (hi1 - star) for f in np.linspace(0.1, 0.9, above)]
        return [float(b) for b in levels]

    def _fold_minimum(self):
        minimum = self.analysis.find_minimum(1)
        if minimum is None:
            raise NoRootError("D no tiene mínimo en el primer intervalo con polos")
        return minimum

    def _small_profile(self) -> StationaryProfile:
        ubar = 0.5 * self.config.evolution.ubar_eps
        roots = self.bmap.solve_ubar(ubar, self.bmap.interval(0))
        if not roots:
            raise NoRootError(f"sin raíz de ubar pequeño ({ubar:.3g}) en el primer intervalo")
        return self.builder.reconstruct(roots[0], self.config.solver.evolution_points)

    def _check_potential(self) -> Tuple[bool, Any, str]:
        t0 = self.potential.theta0
        target = t0 - 0.5 * math.pi / 3
        ref = composite_simpson(self.coef.hg, t0, target, 20000)
        gap = abs(self.potential.G(target) - ref)
        return gap < 1e-10, gap, "G frente a Simpson compuesto"

    def _check_shooting(self, map_fn: MapFn) -> Tuple[bool, Any, str]:
        _, hi = self.bmap.interval(0)
        betas = [float(hi * f) for f in np.linspace(0.05, 0.9, SHOOTING_SAMPLES)]

        def gap(beta: float) -> float:
            quad = 2.0 * self.bmap.D(beta)
            return abs(self.builder.shooting_ubar(beta).ubar - quad) / abs(quad)

        gaps = list(map_fn(gap, betas))
        return max(gaps) < SHOOTING_TOL, max(gaps), f"ubar por disparo frente a 2D(beta), {len(betas)} niveles"

    def _check_tform(self) -> Tuple[bool, Any, str]:
        _, hi = self.bmap.interval(0)
        beta = 0.5 * hi
        gap = abs(self.bmap.D_tform(beta) - self.bmap.D(beta)) / self.bmap.D(beta)
        return gap < SHOOTING_TOL, gap, "forma en t frente a forma angular"

    def _check_conservation(self, levels: List[float]) -> Tuple[bool, Any, str]:
        worst = {"dH1": 0.0, "dH2": 0.0, "dH3": 0.0}
        for beta in levels:
            drift = self.builder.conserved_drift(self.spectral.profile(beta))
            worst["dH1"] = max(worst["dH1"], drift.dH1)
            worst["dH2"] = max(worst["dH2"], drift.dH2 / max(1.0, abs(drift.H2_start)))
            worst["dH3"] = max(worst["dH3"], drift.dH3)
        return max(worst.values()) < DRIFT_TOL, worst, f"deriva de H1, H2, H3 en {len(levels)} perfiles"

    def _check_identity(self, levels: List[float], map_fn: MapFn) -> Tuple[bool, Any, str]:
        gaps = list(map_fn(lambda b: self.spectral.evans_zero_identity(b)[2], levels))
        return max(gaps) < IDENTITY_TOL, max(gaps), f"{len(levels)} niveles"

    def _check_monodromy(self, levels: List[float], map_fn: MapFn) -> Tuple[bool, Any, str]:
        def measure(beta: float) -> Tuple[float, float, float]:
            mono = self.spectral.monodromy(beta)
            shot = self.spectral.E(0.0, beta)
            reduction = abs(mono.evans_from_monodromy - shot) / max(abs(shot), 1e-300)
            return max(mono.gaps().values()), reduction, mono.det_max_drift

        closed, reduction, det = (max(col) for col in zip(*map_fn(measure, levels)))
        ok = closed < MONODROMY_TOL and reduction < REDUCTION_TOL and det < DET_TOL
        measured = {"closed_forms": closed, "determinant": reduction, "det_phi_drift": det, "levels": len(levels)}
        return ok, measured, "formas cerradas, reducción del determinante y det Phi = 1"

    def _check_liouville(self, levels: List[float], map_fn: MapFn) -> Tuple[bool, Any, str]:
        rng = np.random.default_rng(self.seed)
        lo, hi = self.config.windows.lam
        betas = rng.choice(np.asarray(levels), LIOUVILLE_SAMPLES)
        lams = rng.uniform(lo, hi, LIOUVILLE_SAMPLES)
        evaluations = list(map_fn(lambda pair: self.spectral.evans(float(pair[0]), float(pair[1])), zip(lams, betas)))
        worst = max(ev.x_residual / max(1.0, abs(ev.E)) for ev in evaluations)
        return worst < LIOUVILLE_TOL, worst, f"E independiente del punto de empalme, {len(evaluations)} pares (lambda, beta)"

    def _check_fold(self) -> Tuple[bool, Any, str]:
        minimum = self._fold_minimum()
        interval = self.bmap.interval(1)
        below = self.bmap.solve_ubar(0.99 * minimum.ubar_n, interval)
        above = self.bmap.solve_ubar(1.01 * minimum.ubar_n, interval)
        widths = []
        for k in range(3):
            du = 0.01 * minimum.ubar_n * 4.0 ** (-k)
            _, upper = self.analysis.two_roots_near(minimum, minimum.ubar_n + du)
            widths.append(upper - minimum.beta_star)
        ratios = [widths[0] / widths[1], widths[1] / widths[2]]
        ok = not below and len(above) == 2 and all(abs(r - 2.0) < FOLD_TOL * 2.0 for r in ratios)
        return ok, {"roots_below": len(below), "roots_above": len(above), "ratios": ratios}, "pliegue silla-nodo en I1"

    def _check_crossing(self) -> Tuple[bool, Any, str]:
        minimum = self._fold_minimum()
        slope = self.spectral.eigenvalue_slope(minimum.beta_star)
        deriv = self.spectral.evans_lambda_derivative(minimum.beta_star)
        ok = (
            abs(slope.lam_star) < ZERO_EIGEN_TOL
            and slope.lam_minus * slope.lam_plus < 0.0
            and slope.gap < SLOPE_TOL
            and deriv.gap < E_LAMBDA_TOL
        )
        return ok, {"lambda_star": slope.lam_star, "slope_gap": slope.gap, "E_lambda_gap": deriv.gap}, "autovalor cero en beta*"

    def _check_growth(self) -> Tuple[bool, Any, str]:
        """The fold branch with a positive eigenvalue must gain energy from its eigenmode."""
        minimum = self._fold_minimum()
        slope = self.spectral.eigenvalue_slope(minimum.beta_star)
        lower, upper = self.analysis.two_roots_near(minimum, minimum.ubar_n + 0.1 * max(1.0, minimum.ubar_n))
        unstable = upper if slope.fit > 0 else lower
        lam = self.spectral.track_root(unstable, slope.fit * (unstable - minimum.beta_star))
        profile = self.builder.reconstruct(unstable, self.config.solver.evolution_points)
        mode = self.spectral.eigenfunction(lam, unstable, profile.x)
        amplitude = self.config.evolution.amplitude
        report, _ = self.solver.decay_report(profile, initial=(amplitude * mode.U, amplitude * mode.Theta))
        ok = lam > 0.0 and report.L_fit < 0.0
        return ok, {"beta": unstable, "lambda": lam, "L_fit": report.L_fit}, "rama inestable del pliegue crece"

    def _check_decay(self, map_fn: MapFn) -> Tuple[bool, Any, str]:
        profile = self._small_profile()
        seeds = list(range(self.seed, self.seed + DECAY_SEEDS))
        reports = list(map_fn(lambda s: self.solver.decay_report(profile, seed=s)[0], seeds))
        doubled, _ = self.solver.decay_report(profile, T=2.0 * self.config.evolution.T, seed=self.seed)
        drift = abs(doubled.L_fit - reports[0].L_fit) / abs(reports[0].L_fit)
        failed = [r.seed for r in reports if not r.passed]
        ok = not failed and doubled.passed and drift < DOUBLING_DRIFT
        measured = {
            "seeds": len(reports),
            "failed_seeds": failed,
            "L_fit": [r.L_fit for r in reports],
            "T_doubling_drift": drift,
        }
        return ok, measured, "decaimiento de la energía ponderada"

    def _check_self_convergence(self) -> Tuple[bool, Any, str]:
        _, hi = self.bmap.interval(0)
        profiles = [self.builder.reconstruct(0.5 * hi, n) for n in CONVERGENCE_GRIDS]
        gaps = self.solver.self_convergence(profiles)
        residuals = [self.builder.residual(p) for p in profiles]
        integrator = [a / b for a, b in zip(gaps, gaps[1:])]
        residual = [a / b for a, b in zip(residuals, residuals[1:])]
        lo, hi_ratio = CONVERGENCE_RATIO
        ok = all(lo < r < hi_ratio for r in integrator) and all(r > lo for r in residual)
        return ok, {"integrator": integrator, "residual": residual}, f"mallas {list(CONVERGENCE_GRIDS)}"

    def _check_small_ubar(self) -> Tuple[bool, Any, str]:
        sweep = self.small_ubar_sweep()
        spread = [max(r) / min(r) for r in zip(*(b["ratios"] for b in sweep))]
        return max(spread) < SMALL_UBAR_SPREAD, {"sweep": sweep, "spread": spread}, "cotas lineales en ubar"

    def report(self) -> Dict[str, Any]:
        material = validate_material(self.config.material)
        checks = [{
            "name": "material",
            "status": "pass" if material.ok else "fail",
            "measured": {"c_bar": material.c_bar},
            "detail": ", ".join(c.name for c in material.failed()),
        }]
        if material.regime == REGIME_UNSUPPORTED or not material.ok:
            verdict = {"ok": False, "regime": material.regime, "checks": checks}
            self._write("report.json", build_json(verdict))
            return verdict
        has_poles = self.bmap.equilibria.has_poles
        levels = self._sample_levels()
        with self._pool() as map_fn:
            checks.append(self._run_check("potential", self._check_potential))
            checks.append(self._run_check("shooting_oracle", lambda: self._check_shooting(map_fn)))
            checks.append(self._run_check("t_form", self._check_tform))
            checks.append(self._run_check("evans_identity", lambda: self._check_identity(levels, map_fn)))
            checks.append(self._run_check("conservation", lambda: self._check_conservation(levels)))
            checks.append(self._run_check("monodromy", lambda: self._check_monodromy(levels[::2], map_fn)))
            checks.append(self._run_check("liouville", lambda: self._check_liouville(levels, map_fn)))
            no_poles = "sin polos: gamma1 > |gamma2|, la teoría de pliegues no aplica"
            fold_checks = (
                ("saddle_node", self._check_fold),
                ("zero_eigenvalue", self._check_crossing),
                ("unstable_growth", self._check_growth),
            )
            for name, fn in fold_checks:
                if has_poles and len(self.bmap.intervals()) > 1:
                    checks.append(self._run_check(name, fn))
                else:
                    checks.append(self._skip(name, no_poles if not has_poles else "ventana sin segundo intervalo"))
            checks.append(self._run_check("energy_decay", lambda: self._check_decay(map_fn)))
        checks.append(self._run_check("self_convergence", self._check_self_convergence))
        checks.append(self._run_check("small_ubar_bounds", self._check_small_ubar))
        verdict = {
            "ok": all(c["status"] != "fail" for c in checks),
            "regime": material.regime,
            "checks": checks,
        }
        self._write("report.json", build_json(verdict))
        return verdict
