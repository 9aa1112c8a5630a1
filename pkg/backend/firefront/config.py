import os

from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_DIR = os.getenv("FIREFRONT_LOG_DIR", "logs")
DEFAULT_THREADS = int(os.getenv("FIREFRONT_THREADS", "1"))

# Preview tint (RGB) and blend weight - hardcoded for easy tweaking
PREVIEW_TINT = (0, 90, 255)
PREVIEW_ALPHA = 0.5
