'''
Exceptions raised by the orbit analysis. Each carries the CLI exit code it
maps to and an optional diagnostics payload written next to the outputs.
'''

EXIT_CONFIGURATION = 1
EXIT_HYPOTHESIS = 2
EXIT_UNDETERMINED = 3
EXIT_NUMERICAL = 4


class UnrecoverableException(Exception):
    exit_code = EXIT_CONFIGURATION

    def __init__(self, value, diagnostics=None):
        self.value = value
        self.diagnostics = diagnostics or {}

    def __str__(self):
        return str(self.value)

    def payload(self):
        return {
            'error': type(self).__name__,
            'message': str(self.value),
            'exit_code': self.exit_code,
            'diagnostics': self.diagnostics,
        }


class ConfigurationError(UnrecoverableException):
    exit_code = EXIT_CONFIGURATION


class DomainError(UnrecoverableException, ValueError):
    exit_code = EXIT_CONFIGURATION


class InvalidNonlinearity(ConfigurationError):
    '''
        The reaction term violates (f1) or (f2)/(f2'); the message names the clause.
    '''

    def __init__(self, clause, detail):
        self.clause = clause
        super(InvalidNonlinearity, self).__init__(
            f"{clause} violated: {detail}", {'clause': clause})


class NoRootError(InvalidNonlinearity):
    pass


class HypothesisViolation(UnrecoverableException):
    exit_code = EXIT_HYPOTHESIS

    def __init__(self, clause, detail=None):
        self.clause = clause
        message = clause if detail is None else f"{clause}: {detail}"
        super(HypothesisViolation, self).__init__(message, {'clause': clause})


class UndeterminedClassification(UnrecoverableException):
    exit_code = EXIT_UNDETERMINED


class DegenerateCase(UnrecoverableException):
    exit_code = EXIT_UNDETERMINED


class NumericalFailure(UnrecoverableException):
    exit_code = EXIT_NUMERICAL


class StepSizeUnderflow(NumericalFailure):
    def __init__(self, t, step_size):
        super(StepSizeUnderflow, self).__init__(
            f"step size {step_size:.3e} underflow at t={t!r}; "
            "switch to the v-domain integrator",
            {'t': t, 'step_size': step_size})


class MonotonicityLost(NumericalFailure):
    def __init__(self, v_location):
        self.v_location = v_location
        super(MonotonicityLost, self).__init__(
            f"reduced momentum vanished inside the interval at v={v_location!r}",
            {'v_location': v_location})


class BracketingFailure(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    def __init__(self, value, trend=None):
        super(NoConvergence, self).__init__(value, {'trend': list(trend or [])})
