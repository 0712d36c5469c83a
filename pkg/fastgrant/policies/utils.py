import math

from ..models import ArmStats


def confidence_radius(n_active: int, t_active: int, psi: float) -> float:
    return math.sqrt(psi * math.log(t_active) / n_active)


def ucb_index(stats: ArmStats, t_active: int, psi: float) -> float:
    """
    Empirical mean reward of an arm plus its confidence radius
    """
    if stats.n_active < 1 or t_active < 1:
        raise ValueError(
            f"UCB index needs n_active >= 1 and t_active >= 1, got {stats.n_active} and {t_active}"
        )
    return stats.z / stats.n_active + confidence_radius(stats.n_active, t_active, psi)
