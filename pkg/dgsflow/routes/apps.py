from flask import Blueprint, jsonify, request

from dgsflow.apps import APPS
from dgsflow.routes import error_response

apps_bp = Blueprint('apps', __name__)


@apps_bp.route('/apps', methods=['GET'])
def list_apps():
    """Registered applications with their tags and the itags of a k-stream input"""
    try:
        streams = request.args.get('streams', default=2, type=int)
        apps = []
        for name, module in sorted(APPS.items()):
            p = module.program(streams)
            apps.append({
                'name': name,
                'description': p.description,
                'alphabet': sorted(str(t) for t in p.alphabet),
                'itags': [str(i) for i in module.itags_for(streams)],
                'forks': [f.name for f in p.forks],
                'joins': [j.name for j in p.joins],
            })
        return jsonify({'success': True, 'apps': apps})
    except Exception as e:
        return error_response(e)
