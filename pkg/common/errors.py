"""Exception hierarchy for the laboratory.

Library code raises these; the pipeline layer turns them into
``PipelineResult`` records and the CLI into exit codes.
"""

import sys
from typing import Optional, Sequence

if sys.version_info < (3, 11):  # pragma: no cover
    from exceptiongroup import BaseExceptionGroup


class SheLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SheLabError, ValueError):
    """A numeric argument lies outside the domain of an operation."""


class PreconditionError(SheLabError):
    """An operation was called on inputs that violate its preconditions."""


class UnsupportedSpecError(SheLabError):
    """The kernel family does not support the requested operation."""


class VacuousBoundError(SheLabError):
    """No admissible parameter makes the requested bound finite."""


class GateFailure(SheLabError):
    """The kernel fails the well-posedness gate (Dalang or G_p)."""


class ConfigError(SheLabError):
    """The experiment configuration is invalid."""


class BlowUpError(SheLabError):
    """A solution field became non-finite."""

    def __init__(self, step: int, replicas: Sequence[int], message: Optional[str] = None):
        self.step = step
        self.replicas = list(replicas)
        super().__init__(
            message or f"Non-finite values at step {step} in replicas {self.replicas[:10]}"
        )


def unwrap_group(group: BaseExceptionGroup) -> BaseException:
    """The error to re-raise for a failed worker task group.

    Blow-ups from several blocks merge into one error at the earliest step
    with the union of the affected replicas. Otherwise the first
    ``SheLabError`` wins; a group holding none is returned unchanged.
    """
    leaves = []
    pending = [group]
    while pending:
        exc = pending.pop(0)
        if isinstance(exc, BaseExceptionGroup):
            pending.extend(exc.exceptions)
        else:
            leaves.append(exc)
    blowups = [e for e in leaves if isinstance(e, BlowUpError)]
    if blowups and len(blowups) == len(leaves):
        first = min(e.step for e in blowups)
        replicas = sorted({r for e in blowups if e.step == first for r in e.replicas})
        return BlowUpError(first, replicas)
    for exc in leaves:
        if isinstance(exc, SheLabError):
            return exc
    return group
