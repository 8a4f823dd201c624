"""Configuration-driven experiment runner.

Subcommands:

* ``simulate``         integrate DNLS and write a CSV of norms/energies
* ``check-identities`` run the algebraic identity suite, key=value report
* ``check-bounds``     run the inequality checkers and the growth harness

Config files are flat ``key = value`` text; any key can be overridden on the
command line with ``--set key=value``.  Output is deterministic for a fixed
config and seed (the RNG algorithm is recorded in every output header).

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 identity-check
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import bounds, dynamics, energies, lattice, spectral
from .dynamics import NumericalBlowupError
from .lattice import LatticeState

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IDENTITY = 4

RNG_ALGORITHM = "numpy PCG64 (default_rng)"

INITIAL_CONDITIONS = ("plane_wave", "gaussian", "random_bandlimited", "spike")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    n_points: int = 32
    nu: int = 1
    tau: float = 1e-3
    t_end: float = 1.0
    n_max: int = 3
    seed: int = 1234
    initial_condition: str = "random_bandlimited"
    amplitude: float = 1.0
    mode: int = 1  # plane_wave
    width: float = 4.0  # gaussian
    cutoff_fraction: float = 0.25  # random_bandlimited
    record_every: int = 100
    lambda3_budget_n: int = 32
    output_path: str = "dnlslab_out"

    def validate(self) -> None:
        if self.n_points < 8 or self.n_points % 2:
            raise ConfigError("n_points must be even and >= 8")
        if self.nu not in (-1, 1):
            raise ConfigError("nu must be -1 or +1")
        for name in ("tau", "t_end", "width"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 1 <= self.n_max <= lattice.MAX_SOBOLEV_ORDER:
            raise ConfigError(f"n_max must be in [1, {lattice.MAX_SOBOLEV_ORDER}]")
        if self.initial_condition not in INITIAL_CONDITIONS:
            raise ConfigError(f"initial_condition must be one of {INITIAL_CONDITIONS}")
        if self.amplitude < 0:
            raise ConfigError("amplitude must be nonnegative")
        if not 0 < self.cutoff_fraction <= 0.5:
            raise ConfigError("cutoff_fraction must be in (0, 0.5]")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")
        if not -self.n_points // 2 <= self.mode < self.n_points // 2:
            raise ConfigError("mode index outside the grid")


def load_config(path: str | None, overrides: list[str]) -> ExperimentConfig:
    raw: dict[str, str] = {}
    if path is not None:
        text = Path(path).read_text()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value (got {item!r})")
        key, value = (part.strip() for part in item.split("=", 1))
        raw[key] = value

    known = {f.name: f.type for f in fields(ExperimentConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        default = getattr(ExperimentConfig, key)
        try:
            kwargs[key] = type(default)(value) if not isinstance(default, str) else value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    config = ExperimentConfig(**kwargs)
    config.validate()
    return config


def build_initial_state(config: ExperimentConfig) -> LatticeState:
    """Deterministic initial data for the configured kind and seed."""
    n = config.n_points
    a = config.amplitude
    if config.initial_condition == "plane_wave":
        g = np.arange(n)
        return LatticeState(a * np.exp(2j * np.pi * config.mode * g / n))
    if config.initial_condition == "spike":
        values = np.zeros(n, dtype=np.complex128)
        values[0] = a
        return LatticeState(values)
    if config.initial_condition == "gaussian":
        g = np.arange(n) - n // 2
        return LatticeState((a * np.exp(-(g**2) / (2.0 * config.width**2))).astype(np.complex128))
    # random_bandlimited: complex Gaussian coefficients below the cutoff,
    # scaled to the requested L2 size
    rng = np.random.default_rng(config.seed)
    cutoff = max(1, int(config.cutoff_fraction * (n // 2)))
    coeffs = np.zeros(n, dtype=np.complex128)
    modes = spectral.mode_grid(n)
    band = np.abs(modes) <= 2.0 * np.pi * cutoff / n + 1e-12
    coeffs[band] = rng.normal(size=band.sum()) + 1j * rng.normal(size=band.sum())
    u = spectral.idft(spectral.SpectralState(coeffs))
    norm = lattice.l2_norm(u)
    if a == 0.0 or norm == 0.0:
        return u.with_values(np.zeros(n, dtype=np.complex128))
    return u.with_values(u.values * (a / norm))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _header_lines(config: ExperimentConfig) -> list[str]:
    return [
        f"# rng: {RNG_ALGORITHM}, seed {config.seed}",
        "# config: "
        + " ".join(f"{f.name}={getattr(config, f.name)}" for f in fields(ExperimentConfig)),
    ]


def cmd_simulate(config: ExperimentConfig, svg: bool = False) -> int:
    u0 = build_initial_state(config)
    n_max = config.n_max

    observers = {
        "l2": lattice.l2_norm,
        "hamiltonian": lambda u: lattice.hamiltonian(u, config.nu),
    }
    for n in range(1, n_max + 1):
        observers[f"hnorm_{n}"] = (lambda k: lambda u: spectral.symbol_norm(spectral.dft(u), k))(n)
        observers[f"energy_{n}"] = (lambda k: lambda u: energies.modified_energy(k, u, config.nu))(n)

    try:
        traj = dynamics.integrate(
            u0, config.nu, config.tau, config.t_end, observers, config.record_every
        )
    except NumericalBlowupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    columns = ["t", "l2", "hamiltonian"]
    columns += [f"hnorm_{n}" for n in range(1, n_max + 1)]
    columns += [f"energy_{n}" for n in range(1, n_max + 1)]
    columns += [f"rhs_{n}" for n in range(1, n_max + 1)]

    out = Path(config.output_path).with_suffix(".csv")
    lines = _header_lines(config)
    lines.append(",".join(columns))
    for i, t in enumerate(traj.times):
        row = [t] + [traj.observables[c][i] for c in columns[1 : 3 + 2 * n_max]]
        row += [bounds.theorem_rhs(n, t, u0) for n in range(1, n_max + 1)]
        lines.append(",".join(_fmt(x) for x in row))
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")

    if svg:
        _plot_series(out.with_suffix(".svg"), traj, n_max)
    return EXIT_OK


def _plot_series(path: Path, traj, n_max: int) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for n in range(1, n_max + 1):
        ax.plot(traj.times, traj.observables[f"hnorm_{n}"], label=f"$\\dot H^{n}$")
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    print(f"wrote {path}")


def _identity_suite(config: ExperimentConfig, inject_error: bool) -> dict[str, float]:
    """Max relative errors of the algebraic identity suite on random states."""
    rng = np.random.default_rng(config.seed)
    n = config.n_points
    nu = config.nu
    errors: dict[str, float] = {}
    ones = lambda w: np.ones(w.shape[:-1])
    # deliberate corruption of the quadrature weight, to prove the suite can fail
    bad = 1.0 + (1e-3 if inject_error else 0.0)

    def random_state() -> LatticeState:
        return LatticeState(rng.normal(size=n) + 1j * rng.normal(size=n))

    # compact quartic form of the Hamiltonian, and E_1 = 2 pi H
    err_h, err_e1 = 0.0, 0.0
    for _ in range(5):
        u = random_state()
        v = spectral.dft(u)
        lhs = 2.0 * np.pi * lattice.hamiltonian(u, nu)
        quad = 0.5 * (2.0 * np.pi / n) * np.sum(
            (2.0 * np.sin(np.abs(v.modes) / 2.0)) ** 2 * np.abs(v.coeffs) ** 2
        )
        rhs = quad - 0.25 * nu * bad * energies.lambda_m(ones, v, 2).real
        err_h = max(err_h, abs(lhs - rhs) / abs(lhs))
        err_e1 = max(
            err_e1, abs(energies.modified_energy(1, u, nu) - lhs) / abs(lhs)
        )
    errors["hamiltonian_compact"] = err_h
    errors["e1_equals_2pi_h"] = err_e1

    # derivative identity at m = 1 (periodic weight) and m = 2 (mu_2)
    u = random_state()
    v = spectral.dft(u)
    f2 = energies.build_fn(2)
    mu_f = lambda w: energies.eval_fn(f2, w[..., 0])
    mu2 = energies.mu_multiplier(f2, nu)
    budget = config.lambda3_budget_n
    for m, mu in ((1, mu_f), (2, mu2)):
        lhs_d = energies.lambda_time_derivative(mu, u, nu, m, budget)
        dmcos = lambda w, m=m: np.sum(np.cos(w[..., :m]) - np.cos(w[..., m:]), axis=-1)
        rhs_d = -1j * (
            2.0 * energies.lambda_m(lambda w: mu(w) * dmcos(w), v, m, budget)
            + nu * energies.lambda_m(energies.s_m(mu, m), v, m + 1, budget)
        )
        errors[f"derivative_identity_m{m}"] = abs(lhs_d - rhs_d) / max(abs(lhs_d), 1e-30)

    # multiplier cross-check against the raw ratio at off-resonant points
    w_free = rng.uniform(-np.pi, np.pi, size=(2000, 3))
    w_last = energies.fold_to_band(w_free[:, 0] + w_free[:, 1] - w_free[:, 2])
    w = np.concatenate([w_free, w_last[:, None]], axis=1)
    den = energies.d2_cos(w)
    mask = np.abs(den) > 1e-2
    ratio = 0.25 * nu * energies.d2_series(f2, w[mask]) / den[mask]
    errors["mu_ratio_crosscheck"] = float(
        np.max(np.abs(mu2(w[mask]) - ratio)) / max(np.max(np.abs(ratio)), 1e-30)
    )

    # dE_n/dt identity: chain rule vs -i nu Lambda_3(S_2 mu_n)
    for order in (1, 2):
        fn = energies.build_fn(order)
        mun = energies.mu_multiplier(fn, nu)
        chain = (
            energies.lambda_time_derivative(
                lambda w: energies.eval_fn(fn, w[..., 0]), u, nu, 1
            )
            + energies.lambda_time_derivative(mun, u, nu, 2)
        ).real
        direct = energies.energy_derivative_direct(order, u, nu, budget)
        scale = max(abs(chain), abs(direct), bounds.m_quantity(u) ** 2)
        errors[f"energy_derivative_n{order}"] = abs(chain - direct) / scale
    return errors


IDENTITY_TOLERANCES = {
    "hamiltonian_compact": 1e-12,
    "e1_equals_2pi_h": 1e-12,
    "derivative_identity_m1": 1e-10,
    "derivative_identity_m2": 1e-10,
    "mu_ratio_crosscheck": 1e-12,
    "energy_derivative_n1": 1e-10,
    "energy_derivative_n2": 1e-8,
}


def cmd_check_identities(
    config: ExperimentConfig, inject_error: bool = False, allow_large: bool = False
) -> int:
    if config.n_points > config.lambda3_budget_n and not allow_large:
        print(
            f"error: identity suite needs Lambda_3 sums; n_points={config.n_points} exceeds "
            f"lambda3_budget_n={config.lambda3_budget_n} (use --allow-large-lambda3)",
            file=sys.stderr,
        )
        return EXIT_CONFIG

    errors = _identity_suite(config, inject_error)
    all_pass = True
    lines = _header_lines(config)
    for name, err in errors.items():
        ok = err < IDENTITY_TOLERANCES[name]
        all_pass &= ok
        line = f"{name} = {'pass' if ok else 'FAIL'} (max_rel_err={err:.3e})"
        print(line)
        lines.append(line)
    Path(config.output_path).with_suffix(".identities.txt").write_text("\n".join(lines) + "\n")
    return EXIT_OK if all_pass else EXIT_IDENTITY


def cmd_check_bounds(config: ExperimentConfig, svg: bool = False) -> int:
    rng = np.random.default_rng(config.seed)
    n = config.n_points
    lines = _header_lines(config)

    def emit(line: str) -> None:
        print(line)
        lines.append(line)

    # inequality sweeps
    worst_gn = 0.0
    holder_ok = True
    for _ in range(1000):
        u = LatticeState(rng.normal(size=n) + 1j * rng.normal(size=n))
        worst_gn = max(worst_gn, bounds.check_gagliardo_nirenberg(u))
        holder_ok &= bounds.check_holder_interpolation(u, 3)
    emit(f"gagliardo_nirenberg_max_ratio = {worst_gn:.6f}")
    emit(f"gagliardo_nirenberg = {'pass' if worst_gn <= 1.0 else 'FAIL'}")
    emit(f"holder_interpolation = {'pass' if holder_ok else 'FAIL'}")

    scaling_ok = True
    for lam in (2, 4):
        for order in range(1, config.n_max + 1):
            u = build_initial_state(config)
            if lattice.l2_norm(u) == 0.0:
                continue
            report = bounds.check_scaling_invariance(u, lam, order)
            scaling_ok &= report.max_deviation < 1e-12
    emit(f"scaling_invariance = {'pass' if scaling_ok else 'FAIL'}")

    # growth experiment
    u0 = build_initial_state(config)
    try:
        reports = bounds.run_growth_experiment(
            u0, config.nu, config.n_max, config.t_end, config.tau, config.record_every
        )
    except NumericalBlowupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    base = Path(config.output_path)
    for order, rep in reports.items():
        emit(
            f"n={order}: fitted_C={rep.fitted_c:.6g} exponent_fit={rep.exponent_fit:.4f} "
            f"max_ratio={rep.max_ratio:.6g} at t={rep.max_ratio_time:.4g}"
        )
        report_lines = _header_lines(config)
        report_lines += [
            f"n = {order}",
            f"m_value = {_fmt(rep.m_value)}",
            f"fitted_c = {_fmt(rep.fitted_c)}",
            f"max_ratio = {_fmt(rep.max_ratio)}",
            f"max_ratio_time = {_fmt(rep.max_ratio_time)}",
            f"exponent_fit = {_fmt(rep.exponent_fit)}",
            "t,lhs,rhs",
        ]
        report_lines += [
            ",".join(_fmt(x) for x in row) for row in zip(rep.times, rep.lhs, rep.rhs)
        ]
        path = base.parent / f"{base.name}.bounds_n{order}.csv"
        path.write_text("\n".join(report_lines) + "\n")

    summary = base.parent / f"{base.name}.bounds.txt"
    summary.write_text("\n".join(lines) + "\n")
    print(f"wrote {summary}")

    if svg:
        _plot_bounds(base.parent / f"{base.name}.bounds.svg", reports)
    return EXIT_OK


def _plot_bounds(path: Path, reports) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    for order, rep in reports.items():
        ax.plot(rep.times, rep.lhs, label=f"$\\dot H^{order}$")
        ax.plot(rep.times, rep.fitted_c * rep.rhs, "--", label=f"bound n={order}")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    print(f"wrote {path}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dnlslab", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    parser.add_argument("--seed", type=int, help="shortcut for --set seed=...")
    parser.add_argument("--svg", action="store_true", help="emit line plots")
    parser.add_argument(
        "--allow-large-lambda3", action="store_true", help="override the Lambda_3 size budget"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate")
    check = sub.add_parser("check-identities")
    check.add_argument(
        "--inject-error", action="store_true", help="corrupt a quadrature weight (negative test)"
    )
    sub.add_parser("check-bounds")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.set)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "simulate":
        return cmd_simulate(config, svg=args.svg)
    if args.command == "check-identities":
        return cmd_check_identities(
            config, inject_error=args.inject_error, allow_large=args.allow_large_lambda3
        )
    return cmd_check_bounds(config, svg=args.svg)


if __name__ == "__main__":
    sys.exit(main())
