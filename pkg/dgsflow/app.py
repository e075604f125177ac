"""Flask application factory for the dgsflow service."""
import os

from flask import Flask, jsonify
from flask_cors import CORS

from dgsflow import __version__
from dgsflow.config import Config
from dgsflow.models import db
from dgsflow.routes.apps import apps_bp
from dgsflow.routes.checks import checks_bp
from dgsflow.routes.plans import plans_bp
from dgsflow.routes.runs import runs_bp


def create_app(overrides=None):
    app = Flask(__name__)
    app.config.from_object(Config)
    if overrides:
        app.config.update(overrides)

    # Enable CORS for the API
    CORS(app, resources={r'/api/*': {'origins': '*'}})

    uri = app.config['SQLALCHEMY_DATABASE_URI']
    if uri.startswith('sqlite:///') and ':memory:' not in uri:
        os.makedirs(os.path.dirname(uri[len('sqlite:///'):]) or '.', exist_ok=True)
    db.init_app(app)

    for blueprint in (apps_bp, checks_bp, plans_bp, runs_bp):
        app.register_blueprint(blueprint, url_prefix='/api')

    with app.app_context():
        db.create_all()

    @app.route('/health')
    def health_check():
        return {'status': 'healthy', 'message': 'dgsflow service is running', 'version': __version__}, 200

    @app.errorhandler(404)
    def not_found(e):
        return jsonify({'success': False, 'error': 'Not found'}), 404

    return app
