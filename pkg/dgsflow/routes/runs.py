import json

from flask import Blueprint, current_app, jsonify, request

from dgsflow.config import RunConfig
from dgsflow.encoding import to_jsonable
from dgsflow.errors import ConfigError, Deadlock
from dgsflow.models import CheckpointEntry, RunRecord, db
from dgsflow.pipeline import execute
from dgsflow.routes import error_response

runs_bp = Blueprint('runs', __name__)

RUN_FIELDS = ('app', 'streams', 'events_per_stream', 'sync_ratio', 'heartbeat_period', 'seed', 'plan',
              'checkpoint_every')


def _run_config(data):
    if 'app' not in data:
        raise ConfigError('app is required', field='app')
    values = {k: data[k] for k in RUN_FIELDS if k in data}
    if values.get('plan', 'auto') not in ('auto', 'single', 'random'):
        raise ConfigError('plan must be auto, single or random', field='plan')
    try:
        config = RunConfig(**values, mode='simulated')
    except TypeError as e:
        raise ConfigError(str(e))
    config.validate()
    limit = current_app.config['MAX_API_EVENTS']
    if config.streams * config.events_per_stream > limit:
        raise ConfigError(f'runs submitted over HTTP are limited to {limit} events', field='events_per_stream')
    return config


@runs_bp.route('/runs', methods=['POST'])
def create_run():
    """Generate an input, execute it in simulated mode and store the result"""
    try:
        data = request.get_json(silent=True) or {}
        config = _run_config(data)
        record = RunRecord(app=config.app, mode=config.mode, seed=config.seed,
                           config_json=json.dumps(config.to_dict()))
        try:
            plan, result = execute(config, record_checkpoints=True)
        except Deadlock as e:
            record.status = 'deadlock'
            record.error = e.message
            db.session.add(record)
            db.session.commit()
            return jsonify({'success': False, 'error': e.message, 'error_type': e.error_type,
                            'run': record.to_dict()}), 200

        record.plan_json = plan.to_json()
        record.stats_json = json.dumps(result.stats.to_dict())
        record.outputs_json = json.dumps([to_jsonable(o) for o in result.outputs])
        record.outputs_count = len(result.outputs)
        for checkpoint in result.checkpoints:
            record.checkpoints.append(CheckpointEntry(
                worker=checkpoint.worker,
                o_value=json.dumps(list(checkpoint.o_value)),
                state_json=json.dumps(to_jsonable(checkpoint.state)),
            ))
        db.session.add(record)
        db.session.commit()
        return jsonify({'success': True, 'run': record.to_dict()}), 201
    except Exception as e:
        db.session.rollback()
        return error_response(e)


@runs_bp.route('/runs', methods=['GET'])
def list_runs():
    try:
        runs = RunRecord.query.order_by(RunRecord.created_at.desc(), RunRecord.id.desc()).all()
        return jsonify({'success': True, 'runs': [r.to_dict() for r in runs]})
    except Exception as e:
        return error_response(e)


@runs_bp.route('/runs/<int:run_id>', methods=['GET'])
def get_run(run_id):
    record = db.session.get(RunRecord, run_id)
    if record is None:
        return jsonify({'success': False, 'error': 'Run not found'}), 404
    return jsonify({'success': True, 'run': record.to_dict(include_outputs=True)})


@runs_bp.route('/runs/<int:run_id>/checkpoints', methods=['GET'])
def get_checkpoints(run_id):
    record = db.session.get(RunRecord, run_id)
    if record is None:
        return jsonify({'success': False, 'error': 'Run not found'}), 404
    return jsonify({'success': True, 'checkpoints': [c.to_dict() for c in record.checkpoints]})


@runs_bp.route('/runs/<int:run_id>', methods=['DELETE'])
def delete_run(run_id):
    try:
        record = db.session.get(RunRecord, run_id)
        if record is None:
            return jsonify({'success': False, 'error': 'Run not found'}), 404
        db.session.delete(record)
        db.session.commit()
        return jsonify({'success': True, 'message': f'Run {run_id} deleted'})
    except Exception as e:
        db.session.rollback()
        return error_response(e)
