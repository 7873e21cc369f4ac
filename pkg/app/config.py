from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Búsquedas acotadas
    RADO_DEFAULT_BUDGET: int = 200
    RADO_SCAN_LIMIT: int = 20000
    RADO_MAX_TORSION: int = 64

    # Backend BIT: posiciones de bit por debajo de este límite se guardan como int
    RADO_BIT_INT_LIMIT: int = 4096

    # Ventanas y scheduler
    RADO_WINDOW: int = 20
    RADO_STEPS: int = 10
    RADO_SEED: int = 0

    # Árboles de Schreier: rondas materializadas y palabras probadas
    RADO_TREEZATION_ROUNDS: int = 2
    RADO_NEUMANN_BUDGET: int = 2000

    # Logging
    RADO_LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
