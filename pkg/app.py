import logging
import os
import sys

from msic import create_app
from msic.config import Config

logging.basicConfig(
    level=Config.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr
)

app = create_app()

if __name__ == '__main__':
    print("🚀 Starting index coding API...")
    print(f"📐 Oracle guard: m <= {Config.ORACLE_MAX_MESSAGES}, exhaustive verify guard: m <= {Config.VERIFY_MAX_MESSAGES}")
    app.run(
        host=os.getenv("MSIC_HOST", "127.0.0.1"),
        port=int(os.getenv("MSIC_PORT", "5000")),
        debug=os.getenv("FLASK_DEBUG") == "1",
    )
