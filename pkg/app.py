import os
import json
import logging
import uuid

from flask import Flask, jsonify, request, send_file

from config.settings import get_settings
from config.suite_profiles import list_profiles
from services.algebra import derived_series, is_lie, leibniz_kernel, left_centre, lower_central_series, validate
from services.bimodule import composition_series, restrict_to
from services.checker import SuiteConfig, run_suite
from services.constructions import catalogue
from services.errors import LeibnizKernelError
from services.excel_exporter import ExcelExporter
from services.exact_linalg import field_from_token
from services.file_formats import format_algebra, parse_algebra, parse_bimodule, parse_subspace
from services.subnormal import residual_ideal_check, subnormal_chain

settings = get_settings()
logging.basicConfig(level=settings.log_level, format='%(levelname)s %(name)s: %(message)s')
logger = logging.getLogger(__name__)

app = Flask(__name__)
app.secret_key = settings.secret_key


def _session_dir(session_id):
    return os.path.join(get_settings().output_dir, session_id)


def _rows(space):
    return [list(map(space.field.format_value, row)) for row in space.basis]


def _load(data, check=True):
    text = data.get('algebra')
    if not text:
        raise ValueError('algebra text is required')
    return parse_algebra(text, check=check)


def _sub(data, alg, required=False):
    if data.get('sub') is None:
        if required:
            raise ValueError('sub rows are required')
        return alg.full()
    return parse_subspace(data['sub'], alg)


def _handle(compute):
    """Run a request handler, mapping kernel errors to 400 and the rest to 500"""
    data = request.get_json(silent=True) or {}
    try:
        return jsonify(dict(success=True, **compute(data)))
    except (LeibnizKernelError, ValueError, KeyError) as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.exception("request failed")
        return jsonify({'error': str(e)}), 500


@app.route('/')
def index():
    return jsonify({
        'service': 'leibniz-kernel',
        'endpoints': ['/validate', '/series', '/subnormal', '/residual-check', '/compfactors',
                      '/catalogue', '/verify', '/download-report/<session_id>',
                      '/download-report-excel/<session_id>'],
        'profiles': list_profiles(),
    })


@app.route('/validate', methods=['POST'])
def validate_algebra():
    def compute(data):
        alg = _load(data, check=False)
        violations = validate(alg)
        return {
            'valid': not violations,
            'violations': [v.describe(alg.field) for v in violations],
        }
    return _handle(compute)


@app.route('/series', methods=['POST'])
def series():
    def compute(data):
        alg = _load(data)
        report = lower_central_series(alg, _sub(data, alg))
        result = {
            'dims': report.dims,
            'stabilized_at': report.stabilized_at,
            'residual': _rows(report.residual),
            'nilpotent': report.residual.is_zero(),
        }
        if data.get('sub') is None:
            result.update({
                'derived_dims': [t.dim for t in derived_series(alg)],
                'left_centre': _rows(left_centre(alg)),
                'leibniz_kernel': _rows(leibniz_kernel(alg)),
                'is_lie': is_lie(alg),
            })
        return result
    return _handle(compute)


@app.route('/subnormal', methods=['POST'])
def subnormal():
    def compute(data):
        alg = _load(data)
        report = subnormal_chain(alg, _sub(data, alg, required=True))
        return {
            'subnormal': report.subnormal,
            'defect': report.defect,
            'chain': [_rows(term) for term in report.chain],
            'description': report.describe(),
        }
    return _handle(compute)


@app.route('/residual-check', methods=['POST'])
def residual_check():
    def compute(data):
        alg = _load(data)
        report = residual_ideal_check(alg, _sub(data, alg, required=True),
                                      report_only=bool(data.get('report_only', False)))
        return {
            'subnormal': report.subnormal,
            'defect': report.defect,
            'stabilized_at': report.stabilized_at,
            'residual': _rows(report.residual),
            'checks': report.checks,
            'passed': report.passed,
        }
    return _handle(compute)


@app.route('/compfactors', methods=['POST'])
def compfactors():
    def compute(data):
        alg = _load(data)
        if not data.get('bimodule'):
            raise ValueError('bimodule text is required')
        v = parse_bimodule(data['bimodule'], alg)
        if data.get('sub') is not None:
            v = restrict_to(v, _sub(data, alg))
        report = composition_series(v)
        return {
            'series_dims': [s.dim for s in report.series],
            'factor_dims': report.factor_dims,
            'iso_classes': [list(cls) for cls in report.iso_classes],
        }
    return _handle(compute)


@app.route('/catalogue', methods=['GET'])
def get_catalogue():
    def compute(data):
        field = field_from_token(request.args.get('field', 'q'))
        return {
            'entries': [
                {
                    'name': entry.name,
                    'params': entry.params,
                    'expected': entry.expected,
                    'algebra': format_algebra(entry.algebra),
                    'bimodules': [v.name for v in entry.bimodules],
                }
                for entry in catalogue(field)
            ]
        }
    return _handle(compute)


@app.route('/verify', methods=['POST'])
def verify():
    def compute(data):
        session_id = str(uuid.uuid4())
        session_dir = _session_dir(session_id)
        config = SuiteConfig.from_profile(
            data.get('profile', 'quick'),
            fields=data.get('fields'),
            max_dim=data.get('max_dim'),
            budget=data.get('budget'),
            seed=data.get('seed'),
            k_max=data.get('k_max'),
            drop_hypotheses=data.get('drop_hypotheses'),
            failures_dir=os.path.join(session_dir, 'failures'),
        )
        report = run_suite(config)
        os.makedirs(session_dir, exist_ok=True)
        with open(os.path.join(session_dir, 'suite_report.txt'), 'w') as f:
            f.write(report.to_text())
        with open(os.path.join(session_dir, 'suite_report.json'), 'w') as f:
            json.dump(report.to_dict(), f, indent=2)
        return {
            'session_id': session_id,
            'summary': report.to_dict()['summary'],
            'failures': [r.line() for r in report.failures],
            'download_url': f'/download-report/{session_id}',
            'excel_url': f'/download-report-excel/{session_id}',
        }
    return _handle(compute)


@app.route('/download-report/<session_id>')
def download_report(session_id):
    try:
        return send_file(os.path.abspath(os.path.join(_session_dir(session_id), 'suite_report.txt')),
                         as_attachment=True)
    except Exception as e:
        return jsonify({'error': str(e)}), 404


@app.route('/download-report-excel/<session_id>')
def download_report_excel(session_id):
    """Download the suite report in Excel format"""
    try:
        with open(os.path.join(_session_dir(session_id), 'suite_report.json'), 'r') as f:
            report_data = json.load(f)
    except OSError as e:
        return jsonify({'error': str(e)}), 404
    try:
        excel_path = os.path.join(_session_dir(session_id), 'suite_report.xlsx')
        ExcelExporter().export_suite_report(report_data, excel_path)
        return send_file(os.path.abspath(excel_path), as_attachment=True,
                         download_name=f'suite_report_{session_id}.xlsx')
    except Exception as e:
        return jsonify({'error': str(e)}), 500


if __name__ == '__main__':
    app.run(debug=True, host='0.0.0.0', port=8000)
