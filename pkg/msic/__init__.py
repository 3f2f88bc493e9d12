from dotenv import load_dotenv
from flask import Flask

__version__ = "1.0.0"

# Load environment before Config reads it
load_dotenv()


def create_app(config_object="msic.config.Config", **overrides):
    app = Flask(__name__)
    app.config.from_object(config_object)
    app.config.update(overrides)
    app.json.sort_keys = app.config.get("JSON_SORT_KEYS", False)

    from msic.routes import api

    app.register_blueprint(api)
    return app
