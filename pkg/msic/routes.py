import logging

from flask import Blueprint, Response, jsonify, request

from msic.bound import DETERMINISTIC, EXHAUSTIVE, lower_bound, replay, run_algorithm1
from msic.coding import code_from_document
from msic.models import GuardError, InstanceError, MsicError, PreconditionError, parse_instance
from msic.utils import analyze, build_code, build_report, render_dot
from msic.verify import oracle_min_linear, rank_decodable, verify_exhaustive

logger = logging.getLogger(__name__)

api = Blueprint("api", __name__, url_prefix="/api/v1")


def _flag(name):
    return request.args.get(name, "false").lower() in ("1", "true", "yes")


def _instance_body():
    document = request.get_json(silent=True)
    if document is None:
        raise InstanceError("request body must be a JSON instance document")
    return parse_instance(document)


def _success(data):
    return jsonify({"status": "success", "data": data})


@api.errorhandler(InstanceError)
@api.errorhandler(PreconditionError)
def handle_bad_request(e):
    return jsonify({"status": "error", "message": str(e)}), 400


@api.errorhandler(GuardError)
def handle_guard(e):
    return jsonify({"status": "error", "message": str(e)}), 413


@api.errorhandler(MsicError)
def handle_internal(e):
    logger.error(f"Internal error: {e}")
    return jsonify({"status": "error", "message": str(e)}), 500


@api.route("/health", methods=["GET"])
def health():
    return jsonify({"status": "success"})


@api.route("/validate", methods=["POST"])
def validate():
    inst = _instance_body()
    return _success(inst.summary())


@api.route("/simplify", methods=["POST"])
def simplify_instance():
    analysis = analyze(_instance_body())
    return _success({"instance": analysis.simplified.to_document(), "removed": sorted(analysis.removed)})


@api.route("/classify", methods=["POST"])
def classify():
    analysis = analyze(_instance_body())
    return _success(analysis.classification.to_document())


@api.route("/bound", methods=["POST"])
def bound():
    analysis = analyze(_instance_body())
    trace = run_algorithm1(analysis.graphs, EXHAUSTIVE if _flag("exhaustive") else DETERMINISTIC)
    data = {
        "lower_bound": lower_bound(trace),
        "n_connected": trace.n_connected,
        "n_remaining": trace.n_remaining,
        "n_iv": trace.n_iv,
        "mode": trace.mode,
    }
    if _flag("trace"):
        data["trace"] = trace.to_document()
    return _success(data)


@api.route("/code", methods=["POST"])
def code():
    analysis = analyze(_instance_body())
    blueprint, linear_code = build_code(analysis)
    return _success({"blueprint": blueprint.to_document(), "code": linear_code.to_document()})


@api.route("/verify", methods=["POST"])
def verify():
    body = request.get_json(silent=True)
    if not isinstance(body, dict) or "instance" not in body or "code" not in body:
        raise InstanceError("body must be {\"instance\": ..., \"code\": ...}")
    inst = parse_instance(body["instance"])
    linear_code = code_from_document(body["code"], inst.num_messages)
    certificate = rank_decodable(linear_code, inst)
    data = certificate.to_document()
    if _flag("exhaustive"):
        data["exhaustive"] = verify_exhaustive(linear_code, inst)
    return _success(data)


@api.route("/oracle", methods=["POST"])
def oracle():
    analysis = analyze(_instance_body())
    max_len = request.args.get("max_len", type=int)
    result = oracle_min_linear(analysis.simplified, max_len=max_len)
    return _success(result.to_document(lower=lower_bound(run_algorithm1(analysis.graphs))))


@api.route("/report", methods=["POST"])
def report():
    inst = _instance_body()
    data = build_report(
        inst,
        exhaustive=_flag("exhaustive"),
        with_oracle=_flag("oracle"),
        with_trace=_flag("trace"),
    )
    return _success(data)


@api.route("/dot", methods=["POST"])
def dot():
    analysis = analyze(_instance_body())
    g = analysis.graphs
    if _flag("trace"):
        trace = run_algorithm1(g)
        g = replay(trace.original, trace.log)
    return Response(render_dot(g), mimetype="text/vnd.graphviz")
