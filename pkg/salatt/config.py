from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    APP_NAME: str = "salatt-vqa"
    APP_VERSION: str = "0.1.0"
    DEBUG: bool = False  # Show exception details in CLI diagnostics

    # Logging Settings (structlog)
    LOG_LEVEL: str = "INFO"  # DEBUG, INFO, WARNING, ERROR, CRITICAL
    LOG_RENDER_JSON: bool = False  # True for log shipping / CI parsing

    # Environment
    ENVIRONMENT: str = "development"  # development, ci, production

    model_config = SettingsConfigDict(env_file=".env", env_prefix="SALATT_", extra="ignore")


settings = Settings()
