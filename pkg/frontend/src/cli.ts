#!/usr/bin/env node
/** Command-line front of the adapter: `run` exports, `check` validates. */

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import {
  DEFAULT_IOU_THRESHOLD,
  DEFAULT_PROMPT,
  DEFAULT_TEXT_THRESHOLD,
  runDetector,
  writeExport,
} from './detector';
import { exportSchemaCheck } from './schemaCheck';

export function main(argv: string[]): Promise<number> {
  return new Promise((resolve) => {
    yargs(argv)
      .scriptName('detector-adapter')
      .command(
        'run',
        'detect over an image directory and write an export file',
        (y) => y
          .option('images', { type: 'string', demandOption: true,
                              describe: 'directory of .png frames' })
          .option('out', { type: 'string', demandOption: true,
                           describe: 'export JSON path' })
          .option('prompt', { type: 'string', default: DEFAULT_PROMPT })
          .option('text-threshold', { type: 'number', default: DEFAULT_TEXT_THRESHOLD,
                                      describe: 'minimum detection score' })
          .option('iou-threshold', { type: 'number', default: DEFAULT_IOU_THRESHOLD,
                                     describe: 'NMS IoU threshold' })
          .option('suffix', { type: 'string', default: '',
                              describe: 'modality suffix appended to image ids '
                                        + '(_vis, _ir, _fused_<algo>)' })
          .option('backend', { choices: ['stub', 'command'] as const, default: 'stub' })
          .option('command', { type: 'string', array: true,
                               describe: 'detector command (command backend)' }),
        (args) => {
          const doc = runDetector({
            imagesDir: args.images,
            prompt: args.prompt,
            textThreshold: args['text-threshold'],
            iouThreshold: args['iou-threshold'],
            suffix: args.suffix,
            backend: args.backend as 'stub' | 'command',
            command: args.command as string[] | undefined,
          });
          writeExport(doc, args.out);
          const total = Object.values(doc.images).reduce((n, d) => n + d.length, 0);
          console.log(`wrote ${Object.keys(doc.images).length} image(s), `
                      + `${total} detection(s) to ${args.out}`);
          resolve(0);
        },
      )
      .command(
        'check',
        'validate an export file against the interchange schema',
        (y) => y
          .option('file', { type: 'string', demandOption: true })
          .option('images', { type: 'string',
                              describe: 'image directory for bounds checking' }),
        (args) => {
          const result = exportSchemaCheck(args.file, args.images);
          for (const problem of result.problems) {
            console.error(`PROBLEM ${problem}`);
          }
          console.log(result.ok ? 'export OK' : `${result.problems.length} problem(s)`);
          resolve(result.ok ? 0 : 1);
        },
      )
      .demandCommand(1)
      .strict()
      .fail((msg, err) => {
        console.error(`error: ${err?.message ?? msg}`);
        resolve(1);
      })
      .parse();
  });
}

if (require.main === module) {
  main(hideBin(process.argv)).then((code) => process.exit(code));
}
