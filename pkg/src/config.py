"""
Configuration Module

Các model cấu hình (pydantic) cho finder, decider và saturation.
Giá trị mặc định đọc từ biến môi trường (file .env, xem .env.example).
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be an integer, got {value!r}")


class SearchConfig(BaseModel):
    """
    Cấu hình cho bounded model finder

    Attributes:
        max_domain_size: Kích thước domain tối đa (iterative deepening từ 1)
        ubiquitous: U được diễn giải là quan hệ toàn phần
        transitive: Các ký hiệu transitive phải bắc cầu
        max_distinct_elements_per_fact: Số phần tử khác nhau tối đa trong một fact
        ramified: Mỗi cặp phần tử khác nhau nối bởi tối đa một quan hệ transitive
        seed: Seed cho z3 và cho hoán vị phần tử của mô hình trả về
    """

    model_config = ConfigDict(frozen=True)

    max_domain_size: int = Field(default_factory=lambda: _env_int("TRIGUARD_FIND_MAX", 5), ge=1)
    ubiquitous: bool = False
    transitive: bool = False
    max_distinct_elements_per_fact: Optional[int] = Field(default=None, ge=1)
    ramified: bool = False
    seed: int = Field(default_factory=lambda: _env_int("TRIGUARD_SEED", 0), ge=0)

    def replace(self, **changes) -> "SearchConfig":
        return self.model_copy(update=changes)


class Budgets(BaseModel):
    """
    Giới hạn tìm kiếm của các decider

    Attributes:
        alpha_max: |α| tối đa
        beta_max: |β| tối đa
        find_max: Domain size tối đa cho finder
        max_candidates: Số ứng viên (α, β) tối đa thử cho mỗi disjunct
        max_saturation_seed: |C_minus| tối đa được đem đi saturation (0 = không saturation)
        max_grid_side: K = |B*| tối đa khi dựng certificate GF+TG (|A′| = 3K³)
        seed: Seed truyền cho finder qua search_config
    """

    model_config = ConfigDict(frozen=True)

    alpha_max: int = Field(default_factory=lambda: _env_int("TRIGUARD_ALPHA_MAX", 6), ge=1)
    beta_max: int = Field(default_factory=lambda: _env_int("TRIGUARD_BETA_MAX", 12), ge=0)
    find_max: int = Field(default_factory=lambda: _env_int("TRIGUARD_FIND_MAX", 5), ge=1)
    max_candidates: int = Field(default_factory=lambda: _env_int("TRIGUARD_MAX_CANDIDATES", 200), ge=1)
    max_saturation_seed: int = Field(
        default_factory=lambda: _env_int("TRIGUARD_MAX_SATURATION_SEED", 1), ge=0
    )
    max_grid_side: int = Field(default_factory=lambda: _env_int("TRIGUARD_MAX_GRID_SIDE", 8), ge=1)
    seed: int = Field(default_factory=lambda: _env_int("TRIGUARD_SEED", 0), ge=0)

    def search_config(self, **flags) -> SearchConfig:
        flags.setdefault("seed", self.seed)
        return SearchConfig(max_domain_size=self.find_max, **flags)


class SaturationOptions(BaseModel):
    """
    Tùy chọn cho U-saturation

    Attributes:
        constants: Dùng harmonized union/doubling (phần named dùng chung)
        tg_mode: Không copy fact của quan hệ transitive
        check_every_step: Kiểm tra bất biến trên các khối cũ/mới và kiểm tra cục bộ
            sau mỗi bước
        check_stride: Kiểm tra toàn bộ mô hình mỗi `check_stride` bước (0 = không)
        record_facts: Ghi lại các fact được thêm vào trace
        full_final_check: Kiểm tra A_f bằng model checker khi kết thúc
    """

    model_config = ConfigDict(frozen=True)

    constants: bool = False
    tg_mode: bool = False
    check_every_step: bool = False
    check_stride: int = Field(default=0, ge=0)
    record_facts: bool = True
    full_final_check: bool = True
