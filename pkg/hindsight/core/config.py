"""
Hindsight 配置模块

支持三种配置方式（优先级从高到低）：
1. 环境变量
2. .env 文件
3. 默认值

环境变量命名规则：
- 使用前缀 HINDSIGHT_，如：HINDSIGHT_DEFAULT_SPREAD, HINDSIGHT_LOG_LEVEL

示例：
  HINDSIGHT_DEFAULT_SPREAD=0.0002 hindsight optimize --input prices.csv ...
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="HINDSIGHT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # round-trip bid-ask spread used when neither --spread nor --cost is given
    default_spread: float = Field(default=1e-4, ge=0.0)
    tolerance: float = Field(default=1e-9, gt=0.0)
    dinkelbach_max_iter: int = Field(default=60, gt=0)

    oracle_max_n: int = Field(default=20, gt=0)
    oracle_max_nk: int = Field(default=1_000_000, gt=0)
    quadratic_max_n: int = Field(default=5000, gt=0)

    max_workers: int = Field(default=4, gt=0)
    float_digits: int = Field(default=17, gt=0)

    log_level: str = "INFO"


@lru_cache()
def get_settings() -> Settings:
    return Settings()
