import pytest

pytest.importorskip("paradec_adapter", reason="adapter package not installed")
