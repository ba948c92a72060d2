# SPDX-License-Identifier: Apache-2.0
#
# quantbeam: robust ISAC beamforming under low-resolution DACs/ADCs
# Copyright (C) 2026 The quantbeam Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""``python -m quantbeam``: the command-line tool."""

import sys

from . import _core


def main() -> int:
    code, out, err = _core.run_cli(["quantbeam", *sys.argv[1:]])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
