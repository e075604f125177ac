from flask import Blueprint, current_app, jsonify, request

from dgsflow.config import CheckConfig
from dgsflow.errors import ConfigError
from dgsflow.pipeline import check_app
from dgsflow.routes import error_response

checks_bp = Blueprint('checks', __name__)


@checks_bp.route('/check', methods=['POST'])
def run_check():
    """Run the consistency suite for one application"""
    try:
        data = request.get_json(silent=True) or {}
        if 'app' not in data:
            raise ConfigError('app is required', field='app')
        config = CheckConfig(cases=int(data.get('cases', 100)), seed=int(data.get('seed', 0))).validate()
        if config.cases > current_app.config['MAX_API_CASES']:
            raise ConfigError(f"cases is limited to {current_app.config['MAX_API_CASES']}", field='cases')
        report = check_app(data['app'], streams=int(data.get('streams', 2)), config=config)
        return jsonify(report.to_dict())
    except Exception as e:
        return error_response(e)
