from flask import Blueprint, jsonify, request

from dgsflow.apps import get_app
from dgsflow.errors import ConfigError
from dgsflow.optimizer import RateSpec, comm_cost, optimize
from dgsflow.routes import error_response

plans_bp = Blueprint('plans', __name__)


@plans_bp.route('/plans', methods=['POST'])
def create_plan():
    """Synthesize a plan from per-itag rates and locations"""
    try:
        data = request.get_json(silent=True) or {}
        if 'app' not in data or 'itags' not in data:
            raise ConfigError('app and itags are required')
        app = get_app(data['app'])
        rates = RateSpec.from_dict(data)
        streams = int(data.get('streams', max(1, len({i.stream for i in rates.rates}) - 1)))
        p = app.program(streams)
        plan = optimize(p, rates.rates.keys(), rates)
        return jsonify({
            'success': True,
            'plan': plan.to_dict(),
            'dot': plan.to_dot(),
            'cost': comm_cost(plan, rates),
        })
    except Exception as e:
        return error_response(e)
