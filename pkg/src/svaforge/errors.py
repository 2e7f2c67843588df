"""Exception types shared across the package."""


class SvaForgeError(Exception):
    """Base class for all package errors."""


class ParseError(SvaForgeError):
    """Malformed input text.

    Carries the byte offset of the failure and the set of token kinds
    that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: tuple = ()):
        self.offset = offset
        self.expected = frozenset(expected)
        self.message = message
        super().__init__(f"{message} (byte {offset})")


class UnsupportedConstruct(ParseError):
    """Syntactically recognizable input outside the supported subset."""


class UnknownSignal(SvaForgeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown signal: {name}")


class BoundExceeded(SvaForgeError):
    def __init__(self, states_needed: int, max_states: int):
        self.states_needed = states_needed
        self.max_states = max_states
        super().__init__(
            f"enumeration needs {states_needed} states, bound is {max_states}"
        )


class CombinationalCycle(SvaForgeError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("combinational cycle through: " + " -> ".join(self.cycle))


class MultipleDrivers(SvaForgeError):
    def __init__(self, target: str):
        self.target = target
        super().__init__(f"multiple drivers for {target}")


class WidthMismatch(SvaForgeError):
    pass


class BackendError(SvaForgeError):
    """HTTP backend failure after retries, or other transport trouble."""


class MockKeyMissing(BackendError):
    def __init__(self, template_id: str, prompt_hash: str, sample_index: int):
        self.template_id = template_id
        self.prompt_hash = prompt_hash
        self.sample_index = sample_index
        super().__init__(
            f"mock fixture has no entry for ({template_id}, {prompt_hash}, "
            f"{sample_index}); add a line with this key to extend the fixture"
        )


class NoPropertiesParsed(SvaForgeError):
    pass


class EmptyTranslation(SvaForgeError):
    pass


class UnparseableVerdict(SvaForgeError):
    pass


class MissingPlaceholder(SvaForgeError):
    def __init__(self, template_id: str, name: str):
        super().__init__(f"template {template_id!r} needs binding {name!r}")


class ToolUnavailable(SvaForgeError):
    pass


class UnparseableToolOutput(SvaForgeError):
    pass


class CheckpointCorrupt(SvaForgeError):
    def __init__(self, path):
        self.path = str(path)
        super().__init__(f"checkpoint hash mismatch: {self.path}")


class ConfigError(SvaForgeError):
    pass
