"""Start the orchestration service with the two built-in simulated devices.

Examples:
    python3 scripts/run_service.py --token dev-token
    python3 scripts/run_service.py --config service.json
"""
import argparse
import sys

import uvicorn

from ministack.backends import SimulatedDevice, builtin_profiles
from ministack.devices.core import DeviceRegistry
from ministack.service import Orchestrator, ServiceConfig, load_config
from ministack.service.api import create_app


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="service config JSON (flat dotted keys)")
    parser.add_argument("--host", help="override listen host")
    parser.add_argument("--port", type=int, help="override listen port")
    parser.add_argument("--token", action="append", default=[],
                        help="allow this access token (repeatable)")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else ServiceConfig()
    host = args.host or config.host
    port = args.port if args.port is not None else config.port

    if config.allowlist_path:
        registry = DeviceRegistry.from_allowlist_file(
            config.allowlist_path, max_shots=config.max_shots)
        registry._tokens.update(args.token)
    elif args.token:
        registry = DeviceRegistry(args.token, max_shots=config.max_shots)
    else:
        print("no tokens: pass --token or set auth.allowlist_path in the config",
              file=sys.stderr)
        return 2

    for profile in builtin_profiles():
        device_id = registry.register_device(SimulatedDevice(profile))
        print(f"registered device {device_id}")

    orch = Orchestrator(registry, config)
    try:
        print(f"listening on http://{host}:{port}")
        uvicorn.run(create_app(orch), host=host, port=port, log_level="info")
    finally:
        orch.close()
        registry.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
