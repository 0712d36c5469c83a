from abc import ABC, abstractmethod
from typing import List

from ..models import Prediction, SlotState


class SchedulingPolicy(ABC):
    """
    Base class for fast uplink grant schedulers.
    Each slot the engine calls `select`, then `update` once per granted MTD,
    then `end_slot`.
    """

    name = "policy"

    def __init__(self, grants: int):
        if grants < 1:
            raise ValueError(f"grants per slot must be >= 1, got {grants}")
        self.grants = grants

    @abstractmethod
    def select(self, prediction: Prediction, truth: SlotState) -> List[int]:
        """
        Return the MTDs granted this slot
        """

    def update(self, mtd_id: int, reward: float, was_active: bool) -> None:
        """
        Feed back the outcome of one grant
        """

    def end_slot(self) -> None:
        """
        Close the current slot
        """
