"""
Иерархия ошибок конвейера.
Каждая ошибка знает свой код завершения и умеет превращаться в машиночитаемую запись.
"""

from typing import Any, Dict, List, Optional

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


class PipelineError(Exception):
    """Базовая ошибка конвейера"""

    exit_code = 1

    def to_record(self) -> Dict[str, Any]:
        """Машиночитаемая запись об ошибке"""
        return {
            "error": str(self),
            "type": type(self).__name__,
            "exit_code": self.exit_code,
        }


class DataValidationError(PipelineError, ValueError):
    """Нарушение инвариантов входных данных"""

    exit_code = EXIT_VALIDATION


class CorpusFormatError(DataValidationError):
    """Некорректная запись в файле артефакта"""

    def __init__(self, line_number: int, message: str, path: Optional[str] = None):
        self.line_number = line_number
        self.path = path
        where = f"{path}:{line_number}" if path else f"строка {line_number}"
        super().__init__(f"{where}: {message}")

    def to_record(self) -> Dict[str, Any]:
        record = super().to_record()
        record["line"] = self.line_number
        if self.path:
            record["path"] = self.path
        return record


class DimensionMismatchError(DataValidationError):
    """Несовпадение размерностей модели и данных"""

    def __init__(self, name: str, expected: int, actual: int):
        self.name = name
        self.expected = expected
        self.actual = actual
        super().__init__(f"Несовпадение размерности {name}: ожидалось {expected}, получено {actual}")

    def to_record(self) -> Dict[str, Any]:
        record = super().to_record()
        record.update({"dimension": self.name, "expected": self.expected, "actual": self.actual})
        return record


class ConfigurationError(DataValidationError):
    """Несовместимая комбинация параметров"""


class ConfigValidationError(DataValidationError):
    """Ошибки валидации конфигурации по всем полям сразу"""

    def __init__(self, fields: List[str], messages: List[str]):
        self.fields = fields
        self.messages = messages
        super().__init__("Некорректная конфигурация: " + "; ".join(messages))

    def to_record(self) -> Dict[str, Any]:
        record = super().to_record()
        record["fields"] = self.fields
        return record


class ArtifactIOError(PipelineError, OSError):
    """Ошибка чтения или записи артефакта"""

    exit_code = EXIT_IO

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")

    def __str__(self) -> str:
        return self.args[0]

    def to_record(self) -> Dict[str, Any]:
        record = super().to_record()
        record["path"] = self.path
        return record


class NumericError(PipelineError, ArithmeticError):
    """Нечисловые значения в логитах или параметрах"""

    exit_code = EXIT_NUMERIC


def from_pydantic(error) -> ConfigValidationError:
    """Преобразование pydantic.ValidationError в ConfigValidationError"""
    fields = []
    messages = []
    for item in error.errors():
        field = ".".join(str(part) for part in item.get("loc", ())) or "<root>"
        fields.append(field)
        messages.append(f"{field}: {item.get('msg', 'invalid')}")
    return ConfigValidationError(fields, messages)
