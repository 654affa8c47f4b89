import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "l1lens_site.settings")
django.setup()
