# \file    main.py
# \brief   Entry point: configures logging on stderr, hands the arguments to
#          the command-line Interface and turns every outcome into an exit
#          code (0 ok, 1 unexpected, 2 input, 3 inconsistency, 130 interrupt).

import logging
import sys
from typing import TYPE_CHECKING, Optional, Sequence

from errors import ToolkitError

if TYPE_CHECKING:
    from cli_interface import Interface

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def main(ui: 'Interface', argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format=LOG_FORMAT)
    try:
        return ui.start_interface(argv)

    except KeyboardInterrupt:
        ui.information("User interrupt: Exiting...")
        return 130
    except ToolkitError as e:
        ui.warning(f"{type(e).__name__}: {e.message}")
        return e.exit_code
    except Exception as e:
        logger.exception("Exception (main): %s", e)
        return 1
    finally:
        sys.stdout.flush()


if __name__ == '__main__':
    from cli_interface import Interface
    sys.exit(main(Interface()))
