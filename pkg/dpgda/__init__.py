# DPG-da: constraint-aware minority oversampling for tabular data
# Copyright (c) 2025, kisa134 and contributors
#
# This file is part of DPG-da.
#
# DPG-da is free software: you can redistribute it and/or modify
# it under the terms of the MIT License as published by
# the Free Software Foundation.
#
# DPG-da is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# MIT License for more details.
#
# You should have received a copy of the MIT License
# along with DPG-da. If not, see <https://opensource.org/licenses/MIT>.

__version__ = "0.1.0"
__author__ = "kisa134"
__email__ = "kisa134@users.noreply.github.com"
