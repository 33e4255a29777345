#!/usr/bin/python

# Copyright 2025 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License

"""Exception hierarchy shared by the library modules and the CLI.

Library code raises these errors; `main.py` maps them to exit codes:
argument, domain and validation errors exit with 2, numerical and
resource errors exit with 3.
"""


class ClrLabError(Exception):
    """Base error carrying a message and optional diagnostic details."""

    exit_code = 3

    def __init__(self, message, details=None):
        """Initializes ClrLabError.

        Args:
            message (str): Human readable description.
            details (dict, optional): Diagnostics attached to the error,
                for example the failing pivot index or the bracket tried.
        """
        self.message = message
        self.details = dict(details or {})
        super().__init__(message)

    def __str__(self):
        if not self.details:
            return self.message
        info = ', '.join(f'{k}={v}' for k, v in sorted(self.details.items()))  # noqa pylint: disable=C0301
        return f"{self.message} ({info})"


class ArgumentError(ClrLabError):
    """Invalid parameter supplied to an operation."""

    exit_code = 2


class DomainError(ArgumentError):
    """Potential values outside the admissible set (V < 0 or V > Λ)."""


class ValidationError(ArgumentError):
    """Configuration or graph weights failing their contract."""


class NumericalError(ClrLabError):
    """Numerical procedure broke down."""


class RootNotFoundError(NumericalError):
    """Bracket expansion found no sign change."""


class TruncationError(NumericalError):
    """Finite box or radial domain too small for the request."""


class PrecisionError(NumericalError):
    """Kernel error estimate exceeds the budget of its consumer."""


class ResourceError(ClrLabError):
    """A configured capacity (eigenvalue cap, box size) was exceeded."""
