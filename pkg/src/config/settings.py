import os
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
from dotenv import load_dotenv
load_dotenv()


class Settings(BaseSettings):
    """Process settings with QGRAPH_* environment variable support."""

    model_config = SettingsConfigDict(env_prefix="QGRAPH_", extra="ignore")

    # Application
    app_name: str = Field(default="qgraph-loc")
    app_version: str = Field(default="0.1.0")
    log_level: str = Field(default="INFO")
    output_dir: str = Field(default="results")

    # Worker pool
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    # Solvers
    dense_threshold: int = Field(default=500, ge=1, description="DOF count below which dense solvers are used")
    eig_tol: float = Field(default=1e-9, gt=0)
    solve_tol: float = Field(default=1e-11, gt=0)
    solver_seed: int = Field(default=20240611, description="Seed for Lanczos starting vectors")
    krylov_max_dim: int = Field(default=300, ge=10)
    max_eig_iterations: Optional[int] = Field(default=None)

    # Diagnostics
    cnr_budget: int = Field(default=200, ge=1, description="Sub-cube budget before CNR falls back to sampling")
    max_particles: int = Field(default=3, ge=1)
    max_dimension: int = Field(default=3, ge=1)


settings = Settings()
