"""Bridge to an external computer-algebra process over a small line protocol.

Request, written to the process's stdin::

    POLY c0 c1 c2 c3 c4

Response lines, in any order, terminated by ``END``::

    CLS d1 d2 ...      elementary divisors of the class group (empty if trivial)
    REG <decimal>      regulator
    IDX <int>          index of the root-generated unit subgroup

The command comes from ``QU_ORACLE_CMD`` and is split shell-style.
"""

from __future__ import annotations

import os
import shlex
import subprocess
from dataclasses import dataclass

from .arith import IntPoly

__all__ = [
    "ORACLE_ENV",
    "EXPECTED_CLASS_GROUPS",
    "EXPECTED_INDEX",
    "OracleError",
    "OracleMissingError",
    "OracleTimeoutError",
    "OracleParseError",
    "OracleResult",
    "format_request",
    "parse_response",
    "query_oracle",
    "oracle_command",
]

ORACLE_ENV = "QU_ORACLE_CMD"

# class groups of K_s for the first fifteen family members, as elementary
# divisors; reference values computed with PARI/GP
EXPECTED_CLASS_GROUPS: dict[int, tuple[int, ...]] = {
    4: (),
    -12: (4,),
    48: (4, 4, 4),
    -176: (60, 5),
    660: (260, 20, 5),
    -2460: (81120, 4, 2, 2),
    9184: (115500, 28),
    -34272: (25104840, 30, 3),
    127908: (924437696, 4, 4, 4),
    -477356: (1332657200, 20, 2, 2),
    1781520: (28009347406480, 2),
    -6648720: (25020857770200, 20, 4, 2),
    24813364: (3937737813077376, 4, 2),
    -92604732: (21266991873333180, 20, 4, 4),
    345605568: (4788485135078294496, 12, 6),
}

# the roots generate the full unit group for every tabulated s except s = 4
EXPECTED_INDEX: dict[int, int] = {s: 1 for s in EXPECTED_CLASS_GROUPS} | {4: 40}


class OracleError(RuntimeError):
    """Base class for oracle infrastructure failures."""


class OracleMissingError(OracleError):
    pass


class OracleTimeoutError(OracleError):
    pass


class OracleParseError(OracleError):
    pass


@dataclass(frozen=True)
class OracleResult:
    class_group: tuple[int, ...] | None
    regulator: str | None
    unit_index: int | None

    @property
    def class_number(self) -> int | None:
        if self.class_group is None:
            return None
        h = 1
        for d in self.class_group:
            h *= d
        return h


def format_request(poly: IntPoly) -> str:
    if poly.degree != 4:
        raise ValueError("oracle requests carry a quartic")
    return "POLY " + " ".join(str(poly[i]) for i in range(5)) + "\n"


def parse_response(text: str) -> OracleResult:
    cls = reg = idx = None
    ended = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if ended:
            raise OracleParseError(f"output after END: {line!r}")
        tag, _, rest = line.partition(" ")
        try:
            if tag == "CLS":
                divisors = tuple(int(t) for t in rest.split())
                if any(d < 1 for d in divisors):
                    raise ValueError("nonpositive divisor")
                # a trivial group may be sent as "CLS" or "CLS 1"
                cls = tuple(d for d in divisors if d != 1)
            elif tag == "REG":
                if not rest.strip():
                    raise ValueError("empty regulator")
                float(rest)
                reg = rest.strip()
            elif tag == "IDX":
                idx = int(rest)
            elif tag == "END":
                ended = True
            else:
                raise ValueError(f"unknown tag {tag!r}")
        except ValueError as exc:
            raise OracleParseError(f"bad oracle line {line!r}: {exc}") from exc
    if not ended:
        raise OracleParseError("oracle output has no END line")
    return OracleResult(cls, reg, idx)


def oracle_command(env: dict | None = None) -> list[str]:
    env = os.environ if env is None else env
    cmd = env.get(ORACLE_ENV, "").strip()
    if not cmd:
        raise OracleMissingError(f"{ORACLE_ENV} is not set")
    return shlex.split(cmd)


def query_oracle(poly: IntPoly, command: list[str] | None = None, timeout: float = 60.0) -> OracleResult:
    argv = command if command is not None else oracle_command()
    try:
        proc = subprocess.run(
            argv,
            input=format_request(poly),
            capture_output=True,
            text=True,
            timeout=timeout,
            check=False,
        )
    except FileNotFoundError as exc:
        raise OracleMissingError(f"oracle executable not found: {argv[0]}") from exc
    except subprocess.TimeoutExpired as exc:
        raise OracleTimeoutError(f"oracle did not answer within {timeout} s") from exc
    if proc.returncode != 0:
        raise OracleParseError(
            f"oracle exited with status {proc.returncode}: {proc.stderr.strip()[:200]}"
        )
    return parse_response(proc.stdout)
