"""
Django settings for the l1lens project.

Only the parts of Django the toolkit uses are configured: installed apps,
templates (prompt files), logging and the ``L1LENS`` pipeline defaults.
There is no database and no HTTP surface.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = "l1lens-local-only"
key = os.environ.get("DJANGO_SECRET_KEY")
if key:
    SECRET_KEY = key

DEBUG = False
debug = os.environ.get("DJANGO_DEBUG")
if debug:
    DEBUG = debug.lower() == "true"

INSTALLED_APPS = [
    "l1lens",
]

# User prompt versions are looked up before the bundled ones.
PROMPT_DIRS = []
prompt_dir = os.environ.get("L1LENS_PROMPT_DIR")
if prompt_dir:
    PROMPT_DIRS.append(Path(prompt_dir))

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": PROMPT_DIRS,
        "APP_DIRS": True,
        "OPTIONS": {
            "autoescape": False,
            "context_processors": [],
        },
    },
]

DATABASES = {}

# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True

# Pipeline defaults. Precedence: command flags > --config file > these.
L1LENS = {
    "API_KEY_ENV": "L1LENS_API_KEY",
    "ENDPOINT_URL": "https://api.openai.com/v1/chat/completions",
    "MODEL": "gpt-4o",
    "TEMPERATURE": 0.0,
    "MAX_OUTPUT_TOKENS": 2048,
    "RETRIES": 3,
    "BACKOFF_BASE_MS": 500,
    "TIMEOUT_S": 120.0,
    "REQUESTS_PER_MINUTE": 60,
    "MAX_IN_FLIGHT": 4,
    "WORKERS": 1,
    "REVIEW_FRACTION": 0.15,
    "ANNOTATION_SHOTS": 4,
    "PROMPT_VERSION": "v1",
    "DENSITY_FLOOR": 1e-12,
    "DENSITY_GRID_POINTS": 256,
    "LEXICON_DIR": BASE_DIR / "l1lens" / "data" / "lexicons",
    "CARD_DIR": BASE_DIR / "l1lens" / "data" / "cards",
    "SHOT_DIR": BASE_DIR / "l1lens" / "data" / "shots",
}
# Handling environmental variables, same names as the keys above
for name in (
    "API_KEY_ENV",
    "ENDPOINT_URL",
    "MODEL",
    "PROMPT_VERSION",
    "LEXICON_DIR",
    "CARD_DIR",
):
    value = os.environ.get(f"L1LENS_{name}")
    if value:
        L1LENS[name] = value
for name in ("RETRIES", "REQUESTS_PER_MINUTE", "MAX_IN_FLIGHT", "WORKERS"):
    value = os.environ.get(f"L1LENS_{name}")
    if value:
        L1LENS[name] = int(value)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "l1lens": {
            "handlers": ["console"],
            "level": os.environ.get("L1LENS_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}
