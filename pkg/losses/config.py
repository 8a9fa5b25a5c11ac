"""
Гиперпараметры функций потерь и виды обучения.
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator

XI_ALWAYS_STRONG = -1.0


class LossKind(str, Enum):
    """Целевая функция обучения"""
    CE = "CE"
    REWEIGHT = "REWEIGHT"
    CDL = "CDL"
    EDL = "EDL"
    CDL_EDL = "CDL_EDL"

    @property
    def needs_lattice(self) -> bool:
        return self in (LossKind.CDL, LossKind.EDL, LossKind.CDL_EDL)

    @property
    def uses_edl(self) -> bool:
        return self in (LossKind.EDL, LossKind.CDL_EDL)


class LossConfig(BaseModel):
    """
    α, β, ξ для CDL; δ, M для EDL; λ для их суммы.
    Переключатели: PC (корреляции) и RF (перевзвешивание) в CDL, PC и BF (баланс) в EDL.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    alpha: float = Field(1.5, gt=0)
    beta: float = Field(2.0, gt=0)
    xi: float = 0.9
    delta: float = Field(0.5, ge=0)
    lam: float = Field(0.1, ge=0, alias="lambda")
    num_neighbors: int = Field(5, ge=1)
    cdl_pc: bool = True
    cdl_rf: bool = True
    edl_pc: bool = True
    edl_bf: bool = True

    @field_validator("xi")
    @classmethod
    def _check_xi(cls, value: float) -> float:
        if value != XI_ALWAYS_STRONG and not 0.0 <= value <= 1.0:
            raise ValueError("xi должно лежать в [0, 1] или равняться -1")
        return value
