"""
Модуль для хранения артефактов конвейера.
Корпуса, модели и решетки сохраняются в воспроизводимом текстовом формате.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dataset.samples import ClassFrequencies, CorpusHeader, TripletSample, class_frequencies
from lattice.predicate_lattice import PredicateLattice
from model.classifier import Classifier
from storage.formats import (
    format_decimal,
    format_real,
    parse_header,
    parse_int,
    parse_real,
    split_fields,
)
from utils.errors import CorpusFormatError, DataValidationError
from utils.file_handler import read_text, write_text_atomic

logger = logging.getLogger(__name__)


class CorpusStore:
    """Файлы корпусов: '# C= O= D=' и строки scene,subject,object,label,f_1..f_D"""

    @staticmethod
    def save_corpus(samples: Sequence[TripletSample], path: str, header: CorpusHeader):
        """Сохранение корпуса"""
        lines = [f"# C={header.num_classes} O={header.num_objects} D={header.feature_dim}"]
        for sample in samples:
            sample.validate(header)
            fields = [str(sample.scene_id), str(sample.subject_id), str(sample.object_id), str(sample.label)]
            fields.extend(format_decimal(x) for x in sample.features)
            lines.append(",".join(fields))
        write_text_atomic(path, "\n".join(lines) + "\n")
        logger.info(f"Корпус сохранен: {path} ({len(samples)} примеров)")

    @staticmethod
    def load_corpus_with_header(path: str, require_all_classes: bool = False
                                ) -> Tuple[Optional[CorpusHeader], List[TripletSample]]:
        """
        Загрузка корпуса вместе с заголовком

        Args:
            path: Путь к файлу
            require_all_classes: Отклонять корпус, в котором у какого-то класса нет примеров

        Returns:
            (заголовок или None для пустого файла, примеры)
        """
        lines = read_text(path).splitlines()
        records = [(number, line) for number, line in enumerate(lines, start=1) if line.strip()]
        if not records:
            return None, []

        header_number, header_line = records[0]
        values = parse_header(header_line, ["C", "O", "D"], header_number, path)
        try:
            header = CorpusHeader(values["C"], values["O"], values["D"])
        except DataValidationError as e:
            raise CorpusFormatError(header_number, str(e), path)

        samples = []
        expected = 4 + header.feature_dim
        for number, line in records[1:]:
            fields = split_fields(line)
            if len(fields) != expected:
                raise CorpusFormatError(number, f"ожидалось {expected} полей, получено {len(fields)}", path)
            scene_id = parse_int(fields[0], number, "scene_id", path)
            subject_id = parse_int(fields[1], number, "subject_id", path)
            object_id = parse_int(fields[2], number, "object_id", path)
            label = parse_int(fields[3], number, "label", path)
            features = tuple(parse_real(f, number, f"f_{k + 1}", path) for k, f in enumerate(fields[4:]))
            if scene_id < 0:
                raise CorpusFormatError(number, f"scene_id {scene_id} отрицателен", path)
            sample = TripletSample(scene_id, subject_id, object_id, features, label)
            try:
                sample.validate(header)
            except DataValidationError as e:
                raise CorpusFormatError(number, str(e), path)
            samples.append(sample)

        if require_all_classes:
            if not samples:
                raise DataValidationError(f"{path}: корпус пуст")
            class_frequencies(samples, header.num_classes).require_positive()

        logger.info(f"Корпус загружен: {path} ({len(samples)} примеров)")
        return header, samples

    @staticmethod
    def load_corpus(path: str) -> List[TripletSample]:
        """Загрузка примеров корпуса"""
        return CorpusStore.load_corpus_with_header(path)[1]


class ModelStore:
    """Файлы моделей: заголовок, веса построчно, смещение, таблица log prior"""

    @staticmethod
    def save_model(model: Classifier, path: str):
        """Сохранение модели (17 значащих цифр)"""
        has_prior = model.prior_log is not None
        num_objects = model.num_objects if has_prior else 0
        lines = [f"# C={model.num_classes} D={model.feature_dim} O={num_objects} has_prior={int(has_prior)}"]
        lines.append("# weights")
        lines.extend(",".join(format_real(x) for x in row) for row in model.weights)
        lines.append("# bias")
        lines.append(",".join(format_real(x) for x in model.bias))
        if has_prior:
            lines.append("# prior")
            flat = model.prior_log.reshape(num_objects * num_objects, model.num_classes)
            lines.extend(",".join(format_real(x) for x in row) for row in flat)
        write_text_atomic(path, "\n".join(lines) + "\n")
        logger.info(f"Модель сохранена: {path}")

    @staticmethod
    def _read_matrix(lines: List[str], start: int, rows: int, cols: int, name: str,
                     path: str) -> np.ndarray:
        if start + rows > len(lines):
            raise CorpusFormatError(len(lines), f"файл обрывается в секции {name}", path)
        matrix = np.zeros((rows, cols))
        for r in range(rows):
            number = start + r + 1
            fields = split_fields(lines[start + r])
            if len(fields) != cols:
                raise CorpusFormatError(number, f"секция {name}: ожидалось {cols} значений", path)
            matrix[r] = [parse_real(f, number, name, path) for f in fields]
        return matrix

    @staticmethod
    def _expect_marker(lines: List[str], index: int, marker: str, path: str):
        if index >= len(lines) or lines[index].strip() != marker:
            raise CorpusFormatError(index + 1, f"ожидалась строка '{marker}'", path)

    @staticmethod
    def load_model(path: str) -> Classifier:
        """Загрузка модели"""
        lines = read_text(path).splitlines()
        if not lines:
            raise CorpusFormatError(1, "пустой файл модели", path)
        values = parse_header(lines[0], ["C", "D", "O", "has_prior"], 1, path)
        num_classes, dim, num_objects = values["C"], values["D"], values["O"]
        has_prior = values["has_prior"] == 1
        if num_classes < 1 or dim < 1 or (has_prior and num_objects < 1):
            raise CorpusFormatError(1, "некорректные размерности модели", path)

        ModelStore._expect_marker(lines, 1, "# weights", path)
        weights = ModelStore._read_matrix(lines, 2, num_classes, dim, "weights", path)
        index = 2 + num_classes
        ModelStore._expect_marker(lines, index, "# bias", path)
        bias = ModelStore._read_matrix(lines, index + 1, 1, num_classes, "bias", path)[0]
        prior_log = None
        if has_prior:
            index += 2
            ModelStore._expect_marker(lines, index, "# prior", path)
            flat = ModelStore._read_matrix(lines, index + 1, num_objects * num_objects,
                                           num_classes, "prior", path)
            prior_log = flat.reshape(num_objects, num_objects, num_classes)
        logger.info(f"Модель загружена: {path} (C={num_classes}, D={dim}, prior={has_prior})")
        return Classifier(weights=weights, bias=bias, prior_log=prior_log)


class LatticeStore:
    """Файлы решеток: '# C= M=', матрица s, частоты n, списки соседей"""

    @staticmethod
    def save_lattice(lattice: PredicateLattice, path: str):
        """Сохранение решетки"""
        lines = [f"# C={lattice.num_classes} M={lattice.num_neighbors}"]
        lines.extend(",".join(format_real(x) for x in row) for row in lattice.s)
        lines.append(",".join(str(n) for n in lattice.n.counts))
        lines.extend(",".join(str(j) for j in neighbors) for neighbors in lattice.neighbors)
        write_text_atomic(path, "\n".join(lines) + "\n")
        logger.info(f"Решетка сохранена: {path}")

    @staticmethod
    def load_lattice(path: str) -> PredicateLattice:
        """Загрузка решетки"""
        lines = read_text(path).splitlines()
        if not lines:
            raise CorpusFormatError(1, "пустой файл решетки", path)
        values = parse_header(lines[0], ["C", "M"], 1, path)
        num_classes, num_neighbors = values["C"], values["M"]
        if num_classes < 1 or num_neighbors < 1:
            raise CorpusFormatError(1, "некорректные C или M", path)

        s = ModelStore._read_matrix(lines, 1, num_classes, num_classes, "s", path)
        number = num_classes + 2
        if number > len(lines):
            raise CorpusFormatError(len(lines), "нет строки частот", path)
        counts = [parse_int(f, number, "n", path) for f in split_fields(lines[number - 1])]
        if len(counts) != num_classes or min(counts) < 0:
            raise CorpusFormatError(number, "некорректные частоты классов", path)

        width = min(num_neighbors, num_classes - 1)
        neighbors = []
        for i in range(num_classes):
            number += 1
            line = lines[number - 1] if number <= len(lines) else ""
            ids = tuple(parse_int(f, number, "neighbors", path) for f in split_fields(line))
            if len(ids) != width or any(not 0 <= j < num_classes or j == i for j in ids):
                raise CorpusFormatError(number, f"некорректный список соседей класса {i}", path)
            neighbors.append(ids)
        logger.info(f"Решетка загружена: {path}")
        return PredicateLattice(s=s, n=ClassFrequencies(tuple(counts)),
                                neighbors=tuple(neighbors), num_neighbors=num_neighbors)
