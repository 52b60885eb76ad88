"""
Task logging helpers.

One line per event, pipe separated, so runs can be grepped by task name:

    [OPTIMIZE] START | objective=sterling | n=2520
    [OPTIMIZE] SUCCESS | duration=41ms | trades=3
"""
import logging
from typing import Any


def _fields(kwargs: dict) -> str:
    return " | ".join(f"{k}={v}" for k, v in kwargs.items() if v is not None)


def log_task_start(logger: logging.Logger, task_name: str, **kwargs: Any) -> None:
    """记录任务开始日志"""
    logger.info(f"[{task_name}] START | {_fields(kwargs)}")


def log_task_end(
    logger: logging.Logger,
    task_name: str,
    duration_ms: int,
    success: bool,
    **kwargs: Any,
) -> None:
    """记录任务结束日志"""
    status = "SUCCESS" if success else "FAILED"
    logger.info(f"[{task_name}] {status} | duration={duration_ms}ms | {_fields(kwargs)}")


def log_task_error(logger: logging.Logger, task_name: str, error: Exception, **kwargs: Any) -> None:
    """记录任务错误日志"""
    logger.error(
        f"[{task_name}] ERROR | {_fields(kwargs)} | error={type(error).__name__}: {error}"
    )
