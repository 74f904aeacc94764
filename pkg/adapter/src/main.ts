import { getPlugin } from "./plugins.js";
import { serve } from "./serve.js";

function usage(): never {
  process.stderr.write("usage: main.js [--plugin echo|overlap]\n");
  process.exit(1);
}

function pluginName(argv: string[]): string {
  let name = "echo";
  for (let i = 0; i < argv.length; i += 1) {
    if (argv[i] === "--plugin") {
      if (i + 1 >= argv.length) {
        usage();
      }
      name = argv[i + 1];
      i += 1;
    } else {
      usage();
    }
  }
  return name;
}

async function main(): Promise<void> {
  let plugin;
  try {
    plugin = getPlugin(pluginName(process.argv.slice(2)));
  } catch (err) {
    const reason = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: usage: ${reason}\n`);
    process.exit(1);
  }
  const code = await serve(plugin, process.stdin, process.stdout, process.stderr);
  process.exitCode = code;
}

main();
