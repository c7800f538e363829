"""
Read the Fisher–Hartwig symbol corpus

One record per line, whitespace separated, in this order:

    name  theta  theta_prime  alpha1  alpha2  k1  k2  beta1  beta2  t_coeffs

t_coeffs is ``-`` for no trace statistic, otherwise ``k:value`` pairs joined
by ``;`` for k > 0 (value is any Python complex literal, e.g. ``0.2-0.1j``).
Negative indices are completed by conjugation. ``#`` starts a comment.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import config
from src.errors import InvalidArgumentError
from src.metrics.asymptotics import TestimateParams
from src.toeplitz.symbol import Symbol, build_symbol, real_laurent

FIELDS = ("name", "theta", "theta_prime", "alpha1", "alpha2", "k1", "k2", "beta1", "beta2", "t_coeffs")


@dataclass(frozen=True)
class CorpusRecord:
    name: str
    theta: float
    theta_prime: float
    alpha1: float
    alpha2: float
    k1: int
    k2: int
    beta1: float
    beta2: float
    t_coeffs: Dict[int, complex] = field(default_factory=dict)

    def symbol(self) -> Symbol:
        return build_symbol(self.theta, self.theta_prime, self.alpha1, self.alpha2,
                            self.k1, self.k2, self.t_coeffs, beta1=self.beta1, beta2=self.beta2)

    def params(self) -> TestimateParams:
        return TestimateParams(self.alpha1, self.alpha2, self.beta1, self.beta2, self.k1, self.k2,
                               self.theta, self.theta_prime, dict(self.t_coeffs))


def parse_t_coeffs(text: str) -> Dict[int, complex]:
    if text == "-":
        return {}
    positive = {}
    for item in text.split(";"):
        key, _, value = item.partition(":")
        if not value:
            raise InvalidArgumentError(f"malformed trace coefficient {item!r}")
        positive[int(key)] = complex(value.replace(" ", ""))
    return real_laurent(positive)


def parse_record(line: str) -> CorpusRecord:
    parts = line.split()
    if len(parts) != len(FIELDS):
        raise InvalidArgumentError(f"expected {len(FIELDS)} fields, got {len(parts)}: {line!r}")
    name, theta, theta_prime, alpha1, alpha2, k1, k2, beta1, beta2, t_text = parts
    return CorpusRecord(
        name=name,
        theta=float(theta),
        theta_prime=float(theta_prime),
        alpha1=float(alpha1),
        alpha2=float(alpha2),
        k1=int(k1),
        k2=int(k2),
        beta1=float(beta1),
        beta2=float(beta2),
        t_coeffs=parse_t_coeffs(t_text),
    )


def load_corpus(path: Optional[Union[str, Path]] = None) -> List[CorpusRecord]:
    """Parse every record of the corpus file"""
    path = Path(path or config.SYMBOL_CORPUS_PATH)
    records = []
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            records.append(parse_record(line))
        except (ValueError, InvalidArgumentError) as e:
            raise InvalidArgumentError(f"{path}:{number}: {e}") from e
    return records
