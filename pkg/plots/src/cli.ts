/**
 * render --spec <path.json>
 *
 * Reads a figure spec, renders the requested SVG figure, writes it to
 * the spec's output_path.  Exit codes: 0 success, 1 malformed CSV
 * (schema error), 2 bad spec/arguments.
 */
import { SpecError, loadFigureSpec } from "./figure";
import { render } from "./render";
import { SchemaError } from "./schema";

function main(argv: string[]): number {
  const args = argv.slice(2);
  const flag = args.indexOf("--spec");
  if (flag === -1 || flag + 1 >= args.length || args.length !== 2) {
    process.stderr.write("usage: render --spec <path.json>\n");
    return 2;
  }
  try {
    const spec = loadFigureSpec(args[flag + 1]);
    render(spec);
    process.stdout.write(`${spec.output_path}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError) {
      process.stderr.write(`${err.name}: ${err.message}\n`);
      return 2;
    }
    if (err instanceof SchemaError) {
      process.stderr.write(`${err.name}: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${err}\n`);
    return 1;
  }
}

process.exit(main(process.argv));
