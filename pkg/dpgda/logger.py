import logging
import os
import sys

FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(name, level=None):
    """Настройка логгера: stderr всегда, файл только если задан DPGDA_LOG_FILE"""

    if level is None:
        level = os.environ.get("DPGDA_LOG_LEVEL", "INFO")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    formatter = logging.Formatter(FORMAT)

    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Очищаем существующие обработчики
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = os.environ.get("DPGDA_LOG_FILE")
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name):
    """Получить существующий логгер"""
    return logging.getLogger(name)


def log_event(logger, event, level=logging.INFO, **fields):
    """
    Emits one structured progress line: ``event=<event> key=value ...``.
    Floats are rendered with 6 significant digits, keys keep call order.
    """
    parts = [f"event={event}"]
    for key, value in fields.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        parts.append(f"{key}={value}")
    logger.log(level, " ".join(parts))
