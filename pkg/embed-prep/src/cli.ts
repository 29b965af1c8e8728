#!/usr/bin/env node
/**
 * embed-prep --concepts <path> --model <name> --out <path> [--batch-size n]
 *
 * Writes one embedding row per concept gloss in the analysis toolkit's
 * JSON-lines format, plus `<out>.manifest.json` recording the encoder name,
 * dimension and row count.
 */

import { embedGlosses } from './embed.js';

interface CliArgs {
  concepts: string;
  model: string;
  out: string;
  batchSize?: number;
}

function parseArgs(argv: string[]): CliArgs {
  const values = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith('--') || value === undefined) {
      throw new Error(`usage: embed-prep --concepts <path> --model <name> --out <path> [--batch-size n]`);
    }
    values.set(flag.slice(2), value);
  }
  for (const required of ['concepts', 'model', 'out']) {
    if (!values.has(required)) {
      throw new Error(`missing required option --${required}`);
    }
  }
  const args: CliArgs = {
    concepts: values.get('concepts')!,
    model: values.get('model')!,
    out: values.get('out')!,
  };
  if (values.has('batch-size')) {
    const parsed = Number(values.get('batch-size'));
    if (!Number.isInteger(parsed) || parsed < 1) {
      throw new Error(`--batch-size must be a positive integer`);
    }
    args.batchSize = parsed;
  }
  return args;
}

export async function main(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`embed-prep: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }
  try {
    const manifest = await embedGlosses(args.concepts, args.model, args.out, {
      batchSize: args.batchSize,
    });
    console.log(`wrote ${manifest.rows} embeddings (dim ${manifest.dimension}) to ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`embed-prep: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
