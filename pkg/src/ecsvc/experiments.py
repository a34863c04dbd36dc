"""Experiment drivers behind the command line: single runs, sweeps, attacks and the demo.

Every command that writes results uses the same CSV columns (``COLUMNS``).
Free-text details use ``;`` and ``=`` only, so no field ever needs quoting.
"""

from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import eabehp
from .eabehp import AttributeSet, MasterKeyMaterial, Policy, UserKeyMaterial
from .errors import ConfigError
from .group import encode_element, encode_scalar, named_group
from .primitives import digest, keyed_shuffle
from .protocol.network import flip_bit
from .protocol.sessions import recover_with_candidate
from .sim.engine import SimResult, Simulator
from .sim.scenario import Scenario, read_ini

PARAM_COLUMNS = ("group", "data_rate", "sa_clock", "n_sys_att", "n_rx_att", "n_tx_ecu", "n_rx_ecu",
                 "shared_rx", "unauthorized_rx", "seed")
COLUMNS = ("command", "parameter", "value") + PARAM_COLUMNS + (
    "total_time_s", "crypto_s", "bus_s", "frames", "messages", "status", "detail")

SWEEPABLE = {"data_rate": float, "n_sys_att": int, "n_rx_att": int, "n_rx_ecu": int, "n_tx_ecu": int,
             "sa_clock": int}

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_STALL = 0, 2, 3, 4


@dataclass
class ResultRow:
    command: str
    scenario: Scenario
    total_time_s: float
    crypto_s: float
    bus_s: float
    frames: int
    messages: int
    status: str
    detail: str = ""
    parameter: str = ""
    value: str = ""

    def as_dict(self) -> dict:
        row = {"command": self.command, "parameter": self.parameter, "value": self.value}
        row.update(self.scenario.row_params())
        row.update(
            total_time_s=f"{self.total_time_s:.9f}",
            crypto_s=f"{self.crypto_s:.9f}",
            bus_s=f"{self.bus_s:.9f}",
            frames=self.frames,
            messages=self.messages,
            status=self.status,
            detail=self.detail,
        )
        return row

    @classmethod
    def from_sim(cls, command: str, res: SimResult, **kw) -> "ResultRow":
        detail = kw.pop("detail", None)
        if detail is None:
            detail = alert_summary(res.alerts)
        return cls(command, res.scenario, res.total_time_s, res.crypto_s, res.bus_s, res.frames, res.messages,
                   kw.pop("status", res.status), detail, **kw)


def rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r.as_dict())
    return buf.getvalue()


def read_rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def alert_summary(alerts) -> str:
    counts: dict[str, int] = {}
    for a in alerts:
        if a.abort:
            counts[a.code] = counts.get(a.code, 0) + 1
    return ";".join(f"{k}={counts[k]}" for k in sorted(counts))


def exit_code(status: str) -> int:
    if status == "stall":
        return EXIT_STALL
    if status in ("ok", "replay-rejected", "tamper-rejected", "curious-sa-clean"):
        return EXIT_OK
    return EXIT_ABORT


# --- single run ----------------------------------------------------------------

def simulate(sc: Scenario) -> SimResult:
    return Simulator(sc).run(on_stall="alert")


def run_scenario(sc: Scenario) -> tuple[ResultRow, SimResult | None]:
    """Run ``sc`` as configured: a plain epoch, or the attack named in ``[scenario] attack``."""
    if sc.attack == "none":
        res = simulate(sc)
        return ResultRow.from_sim("run", res), res
    return attack_row("run", sc, sc.attack), None


# --- active attacks on the simulated bus ----------------------------------------

@dataclass
class TrialOutcome:
    index: int
    rejected: bool
    codes: tuple[str, ...]
    result: SimResult


def _keys_consistent(res: SimResult) -> bool:
    """No receiver ended up authenticated with a key its publisher did not issue."""
    for name, key in res.receiver_keys.items():
        if res.statuses.get(name) == "mutual-auth-ok":
            pub = int(name.split("/S")[1])
            if key is None or key != res.sender_keys.get(pub):
                return False
    return True


def attack_trials(sc: Scenario, kind: str, trials: int | None = None) -> list[TrialOutcome]:
    """Scripted replay or tamper runs against the epoch after a clean one.

    Each trial rebuilds the vehicle from the scenario seed, runs epoch ``e``
    cleanly and then epoch ``e+1`` with one message substituted.  replay puts
    the previous epoch's message in its place; tamper flips one random bit.
    """
    if kind not in ("replay", "tamper"):
        raise ConfigError(f"unknown attack {kind!r}")
    trials = sc.trials if trials is None else trials
    pick = random.Random(f"{sc.seed}/{kind}")
    clean_sc = sc.replace(attack="none")
    next_sc = clean_sc.replace(epoch=sc.epoch + 1)
    out = []
    for t in range(trials):
        first = Simulator(clean_sc)
        clean = first.run(on_stall="alert")
        previous = clean.transcript
        k = pick.randrange(len(previous))
        bit = pick.randrange(1 << 30)

        def hook(i, data, k=k, bit=bit, previous=previous):
            if i != k:
                return data
            if kind == "replay":
                return previous[k]
            return flip_bit(data, bit % (8 * len(data)))

        res = Simulator(next_sc, hook, previous=first).run(on_stall="alert")
        codes = tuple(sorted({a.code for a in res.alerts if a.abort}))
        rejected = bool(codes) and res.status != "ok" and _keys_consistent(res)
        out.append(TrialOutcome(k, rejected, codes, res))
    return out


def attack_row(command: str, sc: Scenario, kind: str) -> ResultRow:
    if kind == "curious-sa":
        return curious_sa_row(command, sc)
    outcomes = attack_trials(sc, kind)
    n = len(outcomes)
    rejected = sum(o.rejected for o in outcomes)
    codes: dict[str, int] = {}
    for o in outcomes:
        for c in o.codes:
            codes[c] = codes.get(c, 0) + 1
    detail = f"trials={n};rejected={rejected};" + ";".join(f"{c}={codes[c]}" for c in sorted(codes))
    mean = lambda f: sum(f(o.result) for o in outcomes) / n
    status = f"{kind}-rejected" if rejected == n else f"{kind}-accepted"
    return ResultRow(command, sc.replace(attack=kind), mean(lambda r: r.total_time_s), mean(lambda r: r.crypto_s),
                     mean(lambda r: r.bus_s), round(mean(lambda r: r.frames)), round(mean(lambda r: r.messages)),
                     status, detail.rstrip(";"))


# --- honest-but-curious security agent -------------------------------------------

MIN_SCAN_LEN = 8  # shorter encodings collide with unrelated bytes by chance


@dataclass
class CuriousReport:
    violations: list[str]
    exhaustive: dict[str, list[int]]  # receiver session -> decrypting omega candidates
    true_omega: dict[str, int]
    scanned: int
    skipped: int

    @property
    def clean(self) -> bool:
        if self.violations:
            return False
        return all(self.exhaustive[s] == [self.true_omega[s]] for s in self.exhaustive)


def curious_sa_scan(res: SimResult, exhaustive_limit: int = 1 << 12) -> CuriousReport:
    """Search the SA's complete view for session and user secrets.

    The view is every byte the SA received, sent or computed plus its own
    long-term keys.  Secrets shorter than MIN_SCAN_LEN bytes (tiny-group
    scalars) are not scanned.  When q is small enough, every omega candidate
    is tried through ProxyDecrypt for each authorized receiver; only the true
    one may yield the sender's key commitment.
    """
    sa, vehicle = res.sa, res.vehicle
    params = vehicle.params
    view = sa.view_bytes()
    secrets: list[tuple[str, bytes]] = [("K_group", vehicle.master.k_group)]
    senders = {sid: node.sender for sid, node in res.ecus.items() if node.sender is not None}
    for sid, s in senders.items():
        if s.K is None:
            continue
        secrets += [
            (f"K[S{sid}]", s.K),
            (f"K'[S{sid}]", s.k_wrapped),
            (f"omega[S{sid}]", encode_scalar(s.omega, params)),
            (f"M[S{sid}]", encode_element(s.commitment, params)),
            (f"H(M)[S{sid}]", digest(encode_element(s.commitment, params))),
            (f"timekey-digest[S{sid}]", digest(s.r_k + vehicle.master.k_group)),
        ]
    for eid, ev in vehicle.ecus.items():
        for i, a in ev.uk.sk.items():
            secrets.append((f"SK[{eid},{i}]", encode_scalar(a, params)))
    violations, scanned, skipped = [], 0, 0
    for name, blob in secrets:
        if len(blob) < MIN_SCAN_LEN:
            skipped += 1
            continue
        scanned += 1
        if blob in view:
            violations.append(name)

    exhaustive, true_omega = {}, {}
    if params.q <= exhaustive_limit:
        for (rid, pub), sess in sa.receivers.items():
            sender = senders.get(pub)
            if sess.i_hat is None or sender is None or sender.commitment is None:
                continue
            if rid not in res.topology.authorized:
                continue
            uk = vehicle.ecus[rid].uk
            base = sum(uk.sk.values())
            name = f"R{rid}/S{pub}"
            exhaustive[name] = [
                w for w in range(params.q)
                if recover_with_candidate(sa, rid, pub, (base + w) % params.q, uk.attr_set) == sender.commitment
            ]
            true_omega[name] = sender.omega
    return CuriousReport(violations, exhaustive, true_omega, scanned, skipped)


def curious_sa_row(command: str, sc: Scenario, dump_path=None) -> ResultRow:
    """``trials`` runs with consecutive seeds, each scanned; status is clean only if all are."""
    sc = sc.replace(attack="none")
    bad, checked, unique = 0, 0, 0
    results = []
    for t in range(sc.trials):
        res = simulate(sc.replace(seed=sc.seed + t))
        rep = curious_sa_scan(res)
        results.append(res)
        checked += len(rep.exhaustive)
        unique += sum(rep.exhaustive[s] == [rep.true_omega[s]] for s in rep.exhaustive)
        if not rep.clean or res.status != "ok":
            bad += 1
        if dump_path is not None and t == 0:
            with open(dump_path, "w", encoding="utf-8") as fh:
                fh.write(res.sa.view_bytes().hex() + "\n")
    n = len(results)
    mean = lambda f: sum(f(r) for r in results) / n
    status = "curious-sa-clean" if bad == 0 else "curious-sa-leak"
    detail = f"trials={n};violating_runs={bad};omega_checks={checked};unique_omega={unique}"
    return ResultRow(command, sc, mean(lambda r: r.total_time_s), mean(lambda r: r.crypto_s),
                     mean(lambda r: r.bus_s), round(mean(lambda r: r.frames)), round(mean(lambda r: r.messages)),
                     status, detail)


# --- sweeps -----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    baseline: Scenario

    def scenarios(self) -> list[tuple[object, Scenario]]:
        out = []
        for v in sorted(self.values):
            try:
                out.append((v, self.baseline.replace(**{self.parameter: v})))
            except ConfigError as exc:
                raise ConfigError(f"[sweep] {self.parameter} = {v}: {exc}") from None
        return out


def parse_sweep(text: str) -> SweepSpec:
    kwargs, extras = read_ini(text, {"sweep": {"parameter", "values"}})
    sweep = extras.get("sweep")
    if not sweep or "parameter" not in sweep or "values" not in sweep:
        raise ConfigError("a sweep spec needs [sweep] parameter = ... and values = ...")
    param = sweep["parameter"].strip()
    if param not in SWEEPABLE:
        raise ConfigError(f"cannot sweep {param!r}; choose one of {', '.join(SWEEPABLE)}")
    from .sim.scenario import _coerce

    raw = sweep["values"].replace(",", " ").split()
    if not raw:
        raise ConfigError("[sweep] values is empty")
    values = tuple(_coerce(SWEEPABLE[param], v, "sweep", "values") for v in raw)
    if len(set(values)) != len(values):
        raise ConfigError("[sweep] values repeat")
    spec = SweepSpec(param, values, Scenario(**kwargs))
    spec.scenarios()  # every point must be a valid scenario, cost-table range included
    return spec


def load_sweep(path) -> SweepSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_sweep(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def _sweep_point(item):
    parameter, value, sc = item
    row, _ = run_scenario(sc)
    row.command, row.parameter, row.value = "sweep", parameter, _fmt(value)
    return row


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[ResultRow]:
    items = [(spec.parameter, v, sc) for v, sc in spec.scenarios()]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, items))
    return [_sweep_point(it) for it in items]


# --- worked tiny-group example -----------------------------------------------------

def demo_text() -> str:
    """The tiny-group pipeline with fixed inputs and every intermediate value."""
    params = named_group("tiny")
    q = params.q
    a = (3, 5, 7)
    k_s = 9
    mk = MasterKeyMaterial(params, k_s, tuple(pow(params.g, x, params.p) for x in a),
                           tuple((k_s - x) % q for x in a), bytes(16))
    policy = Policy((1, 0, -1))
    M, r, tuples, omega = 9, 2, (9, 1, 3), 5
    lines = [
        f"group: p={params.p} q={params.q} g={params.g}",
        f"attribute secrets a={a}  K_S={k_s}",
        f"PK={mk.pk_attrs}  TK={mk.tk}",
        f"policy T={policy.trits}  M={M}  r={r}  split={tuples}  omega={omega}",
    ]
    c = eabehp.encrypt(mk.mpk, policy, omega, M, None, r=r, tuples=tuples)
    lines.append(f"Encrypt: A={c.A} B={c.B} D={c.D}")
    sc1 = eabehp.shuffle(c, omega)
    perm = keyed_shuffle(omega, 3)
    lines.append(f"Shuffle: SH={perm.forward} -> B^={sc1.B}")
    sc2 = eabehp.transform_ciphertext(sc1, mk.tk, params)
    lines.append(f"Transform: B''={sc2.B}")
    for label, attrs, sk in (("authorized", (1,), {1: 2}), ("holds an unrequired attribute", (1, 3), {1: 2, 3: 4})):
        i_r = AttributeSet.of(attrs, 3)
        uk = UserKeyMaterial(10, i_r, sk, sum(k_s - v for v in sk.values()) % q)
        ak = eabehp.transform_user_key(omega, uk, params)
        i_hat = eabehp.inverse_permute_attrs(i_r, omega, 3)
        ec = eabehp.extract(sc2, i_hat, params)
        pd = eabehp.proxy_decrypt1(ec, ak, uk.rk, mk.tk, params)
        m = eabehp.proxy_decrypt2(pd, i_r, i_hat, params)
        lines += [
            f"receiver ({label}): I_r={i_r.indices} SK={dict(sk)} RK={uk.rk} AK={ak}",
            f"  Extract: I^={i_hat.indices} B_prod={ec.B_prod}",
            f"  ProxyDecrypt1: sC''={pd.sc_dd} AM={pd.am}",
            f"  ProxyDecrypt2: M'={m} ({'matches' if m == M else 'does not match'} M)",
        ]
    return "\n".join(lines) + "\n"
