from enum import Enum


class CRHStatusType(Enum):
    OK = 'crh_status_ok'
    USAGE_ERROR = 'crh_status_usage_error'
    DIVERGED = 'crh_status_diverged'
    VERIFICATION_FAILED = 'crh_status_verification_failed'

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self]


_EXIT_CODES = {
    CRHStatusType.OK: 0,
    CRHStatusType.USAGE_ERROR: 1,
    CRHStatusType.DIVERGED: 2,
    CRHStatusType.VERIFICATION_FAILED: 3,
}


class CRHStatus:
    status: bool = True
    error_type: CRHStatusType = CRHStatusType.OK
    message: str = 'Ok'

    def __init__(self, error_type: CRHStatusType = CRHStatusType.OK, message: str = 'Ok'):
        self.error_type = error_type
        self.status = error_type == CRHStatusType.OK
        self.message = message

    @property
    def exit_code(self) -> int:
        return self.error_type.exit_code

    def __repr__(self):
        return f"CRHStatus({self.error_type.name}, {self.message!r})"
