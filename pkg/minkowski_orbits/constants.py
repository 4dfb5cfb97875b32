SCHEMA_VERSION = 1

# structural roots
ROOT_TOLERANCE = 1e-12
SIGN_SCAN_SAMPLES = 10000
TABULATED_QUADRATURE_TOLERANCE = 1e-12
BALANCE_TOLERANCE = 1e-12

# integrators
RTOL = 1e-10
ATOL = 1e-12
MIN_STEP = 1e-15
EVENT_TIME_TOLERANCE = 1e-12
EQUILIBRIUM_RADIUS = 1e-9
REDUCED_MOMENTUM_FLOOR = 1e-13
ENDPOINT_TOLERANCE = 1e-6
REDUCED_START_MOMENTUM = 1e-9
BLOWUP_MOMENTUM = 1e12

# shooting
SHOOT_RESIDUAL = 1e-10
CAUCHY_TOLERANCE = 1e-9
MAX_DOUBLINGS = 12
DEFAULT_T1 = 1.0
SCAN_DIVISIONS = 100
REDUCED_V_MIN = 1e-8
FAR_END_TOLERANCE = 1e-6
SHOOT_LOG_TOLERANCE = 1e-13
POLISH_WINDOW = 1e-6

# connections
DEFAULT_GRID_POINTS = 200
RHO_TOLERANCE = 1e-9
EXIT_HORIZON = 1e3
EXIT_SLOPE = 1e-6
MAX_RHO_STEP = 1e-3
BRANCH_COINCIDENCE = 1e-7
TAIL_MOMENTUM = 1e-10
TAIL_CUTOFF = 1e-9
TAIL_SAMPLES = 60
PERIODIC_TAIL_PERIODS = 3

# asymptotics
SWEEP_HALF_WINDOW = 2.0
SWEEP_WINDOW_POINTS = 4001

COMMANDS = [
    'autonomous-orbit', 'period', 'shoot', 'halfline', 'kappa-branch',
    'heteroclinic', 'homoclinic', 'periodic-tail', 'classify-stepwise',
    'nonexistence', 'sweep', 'limit-profile', 'nonlinearity-table',
    'potential-family', 'classify-grid',
]

OUTPUT_FORMATS = ['csv', 'json', 'both']

nonlinearity_json_schema = {
    "type": "object",
    "properties": {
        "kind": {"type": "string", "enum": ["cubic-bistable", "polynomial", "tabulated"]},
        "a": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "coefficients": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "nodes": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            "minItems": 2,
        },
    },
    "required": ["kind"],
    "additionalProperties": False,
}

weight_piece_json_schema = {
    "type": "object",
    "properties": {
        "from": {"type": ["number", "null"]},
        "to": {"type": ["number", "null"]},
        "constant": {"type": "number"},
        "samples": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "expression": {"type": "string"},
        "step": {"type": "number", "exclusiveMinimum": 0},
        "period": {"type": "number", "exclusiveMinimum": 0},
        "origin": {"type": "number"},
    },
    "required": ["from", "to"],
    "additionalProperties": False,
}

weight_json_schema = {
    "type": "object",
    "properties": {
        "t0": {"type": "number"},
        "pieces": {"type": "array", "items": weight_piece_json_schema, "minItems": 1},
    },
    "required": ["pieces"],
    "additionalProperties": False,
}

output_json_schema = {
    "type": "object",
    "properties": {
        "directory": {"type": "string"},
        "format": {"type": "string", "enum": OUTPUT_FORMATS},
    },
    "additionalProperties": False,
}

scenario_json_schema = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "scenario",
    "type": "object",
    "properties": {
        "schema_version": {"type": "integer"},
        "command": {"type": "string", "enum": COMMANDS},
        "name": {"type": "string"},
        "nonlinearity": nonlinearity_json_schema,
        "weight": weight_json_schema,
        "delta": {
            "oneOf": [
                {"type": "number", "exclusiveMinimum": 0},
                {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
            ]
        },
        "parameters": {"type": "object"},
        "output": output_json_schema,
        "parallel": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["command", "nonlinearity", "delta"],
    "additionalProperties": False,
}
